#include "twinspace/session/service.hpp"

#include "twinspace/core/dataset.hpp"
#include "twinspace/error.hpp"
#include "twinspace/tour/slice.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

namespace twinspace::session {

using nlohmann::json;

const char* to_string(JobState s)
{
    switch (s) {
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
    case JobState::cancelled: return "cancelled";
    }
    return "?";
}

namespace {

struct Job {
    std::string id;
    std::string kind;
    std::string panel;
    JobControl ctl;
    JobState state = JobState::running;
    json result;
    std::string error;
    std::thread thread;
};

struct TourRecord {
    tour::TourPath path;
    core::Space space = core::Space::linked;
    std::string color_by = "cluster";
    std::vector<int> colors;
    Matrix coords;
    std::string coords_key;
};

} // namespace

class Session {
public:
    std::string id;
    mutable std::mutex mu;
    std::condition_variable job_cv;

    std::shared_ptr<const InputData> input;
    std::optional<Settings> settings;
    std::unique_ptr<Analysis> analysis;
    std::uint64_t revision = 0;

    std::vector<long> selection;
    std::string selection_origin;
    std::uint64_t selection_revision = 0;

    std::map<std::string, std::shared_ptr<Job>> jobs;
    std::map<std::pair<std::string, std::string>, std::string> active;
    std::map<std::string, TourRecord> tours;
    std::map<std::string, std::shared_ptr<const nldr::Embedding>> embeddings;
    std::uint64_t next_job = 0;

    mutable std::mutex ev_mu;
    mutable std::condition_variable ev_cv;
    std::vector<Event> events;

    void publish(std::string type, json data)
    {
        {
            std::lock_guard lock(ev_mu);
            events.push_back({events.size() + 1, std::move(type), std::move(data)});
        }
        ev_cv.notify_all();
    }

    // Caller holds `mu`.
    Analysis& ready()
    {
        if (!analysis || !settings) throw Error("no data uploaded to session '" + id + "'");
        return *analysis;
    }

    std::vector<std::shared_ptr<Job>> all_jobs()
    {
        std::lock_guard lock(mu);
        std::vector<std::shared_ptr<Job>> out;
        for (auto& [k, j] : jobs) out.push_back(j);
        return out;
    }
};

namespace {

// Work runs off-lock and returns a commit step that runs under the session
// lock and produces the job's result document.
using Commit = std::function<json(Session&)>;
using Work = std::function<Commit(JobControl*)>;

std::string start_job(const std::shared_ptr<Session>& sess, const std::string& kind,
                      const std::string& panel, Work work)
{
    // Caller holds sess->mu.
    auto job = std::make_shared<Job>();
    job->id = "j" + std::to_string(++sess->next_job);
    job->kind = kind;
    job->panel = panel;
    const auto slot = std::make_pair(panel, kind);
    if (const auto it = sess->active.find(slot); it != sess->active.end()) {
        sess->jobs.at(it->second)->ctl.cancel = true;
    }
    sess->active[slot] = job->id;
    sess->jobs[job->id] = job;
    sess->publish("job", {{"job", job->id}, {"kind", kind}, {"panel", panel}, {"state", "running"}});

    job->thread = std::thread([sess, job, work = std::move(work)] {
        JobState state = JobState::done;
        json result;
        std::string error;
        try {
            Commit commit = work(&job->ctl);
            check_cancel(&job->ctl);
            std::lock_guard lock(sess->mu);
            if (job->ctl.cancel) throw Cancelled();
            result = commit(*sess);
        } catch (const Cancelled&) {
            state = JobState::cancelled;
        } catch (const std::exception& e) {
            state = JobState::failed;
            error = e.what();
        }
        {
            std::lock_guard lock(sess->mu);
            job->state = state;
            job->result = std::move(result);
            job->error = error;
            job->ctl.progress = 1.0;
        }
        sess->job_cv.notify_all();
        sess->publish("job", {{"job", job->id}, {"kind", job->kind}, {"panel", job->panel},
                              {"state", to_string(state)}});
    });
    return job->id;
}

std::string finished_job(Session& sess, const std::string& kind, const std::string& panel, json result)
{
    auto job = std::make_shared<Job>();
    job->id = "j" + std::to_string(++sess.next_job);
    job->kind = kind;
    job->panel = panel;
    job->state = JobState::done;
    job->result = std::move(result);
    job->ctl.progress = 1.0;
    sess.jobs[job->id] = job;
    sess.publish("job", {{"job", job->id}, {"kind", kind}, {"panel", panel}, {"state", "done"}});
    return job->id;
}

std::string random_token()
{
    std::random_device rd;
    std::uniform_int_distribution<std::uint64_t> dist;
    std::ostringstream out;
    out << std::hex << dist(rd);
    return out.str();
}

json tour_record_json(const TourRecord& r, const std::string& panel, const std::string& current_key)
{
    json out = tour_payload(r.path, r.coords, r.colors, r.color_by, r.space);
    out["panel"] = panel;
    out["stale"] = r.coords_key != current_key;
    return out;
}

} // namespace

Service::Service() = default;

Service::~Service()
{
    std::vector<std::shared_ptr<Session>> all;
    {
        std::lock_guard lock(mu_);
        for (auto& [k, s] : sessions_) all.push_back(s);
    }
    for (auto& s : all) {
        for (auto& job : s->all_jobs()) job->ctl.cancel = true;
        for (auto& job : s->all_jobs()) {
            if (job->thread.joinable()) job->thread.join();
        }
    }
}

std::shared_ptr<Session> Service::find(const std::string& id) const
{
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
    return it->second;
}

std::string Service::create_session()
{
    auto s = std::make_shared<Session>();
    std::lock_guard lock(mu_);
    s->id = random_token() + std::to_string(++next_session_);
    sessions_[s->id] = s;
    return s->id;
}

void Service::delete_session(const std::string& id)
{
    std::shared_ptr<Session> s;
    {
        std::lock_guard lock(mu_);
        const auto it = sessions_.find(id);
        if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
        s = it->second;
        sessions_.erase(it);
    }
    for (auto& job : s->all_jobs()) job->ctl.cancel = true;
    for (auto& job : s->all_jobs()) {
        if (job->thread.joinable()) job->thread.join();
    }
}

std::uint64_t Service::revision(const std::string& id) const
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return s->revision;
}

json Service::upload_data(const std::string& id, const json& body)
{
    auto s = find(id);
    if (!body.is_object() || !body.contains("csv") || !body["csv"].is_string()) {
        throw SchemaError("/csv", "missing CSV text");
    }
    auto input = std::make_shared<InputData>();
    input->table = core::parse_dataset(body["csv"].get<std::string>());
    if (body.contains("distances_csv") && body["distances_csv"].is_string()) {
        input->precomputed = cluster::parse_distance_csv(body["distances_csv"].get<std::string>());
    }

    json patch = body.value("settings", json::object());
    core::RoleSpec roles;
    if (body.contains("roles")) {
        patch["roles"] = body["roles"];
    } else if (!patch.contains("roles")) {
        throw SchemaError("/roles", "missing role assignment");
    }
    // Parse the roles on their own first so defaults can be derived.
    {
        json probe{{"roles", patch["roles"]}};
        roles = settings_from_json(probe).roles;
    }
    json merged = to_json(default_settings(roles, input->table.n_rows()));
    merged.merge_patch(patch);
    Settings settings = settings_from_json(merged);
    validate(settings, input->table);

    auto analysis = std::make_unique<Analysis>(input);
    const auto spaced = analysis->spaced(settings);
    const auto groups = analysis->groups(settings);

    std::lock_guard lock(s->mu);
    s->input = input;
    s->settings = std::move(settings);
    s->analysis = std::move(analysis);
    s->tours.clear();
    s->embeddings.clear();
    s->selection.clear();
    ++s->revision;
    json summary{{"n", spaced->n},
                 {"p_c", spaced->clustering.cols()},
                 {"p_l", spaced->linked.cols()},
                 {"p_k", spaced->extras.cols()},
                 {"n_groups", groups ? groups->n_groups() : 0},
                 {"clustering", spaced->clustering_names},
                 {"linked", spaced->linked_names},
                 {"extras", spaced->extras_names},
                 {"revision", s->revision}};
    s->publish("data", summary);
    return summary;
}

json Service::get_config(const std::string& id) const
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    if (!s->settings) throw Error("no data uploaded to session '" + id + "'");
    return to_json(*s->settings);
}

ConfigUpdate Service::set_config(const std::string& id, const json& patch)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    Analysis& a = s->ready();
    const Settings& old = *s->settings;
    json merged = to_json(old);
    merged.merge_patch(patch);
    Settings next = settings_from_json(merged);
    validate(next, a.input().table);

    ConfigUpdate update;
    auto changed = [&](const std::string& stage, bool differs) {
        if (differs) update.plan.push_back(stage);
    };
    const auto& c0 = old.clustering;
    const auto& c1 = next.clustering;
    changed("roles", Analysis::roles_key(old) != Analysis::roles_key(next));
    changed("coords:clustering", Analysis::coords_key(old, core::Space::clustering) !=
                                     Analysis::coords_key(next, core::Space::clustering));
    changed("coords:linked", Analysis::coords_key(old, core::Space::linked) !=
                                 Analysis::coords_key(next, core::Space::linked));
    changed("distances", Analysis::distances_key(old, core::Space::clustering, c0.metric) !=
                             Analysis::distances_key(next, core::Space::clustering, c1.metric));
    changed("tree", Analysis::tree_key(old, c0) != Analysis::tree_key(next, c1));
    changed("solution", Analysis::tree_key(old, c0) != Analysis::tree_key(next, c1) || c0.k != c1.k);
    const auto comparison_key = [](const Settings& st) {
        const auto c = st.comparison.value_or(st.clustering);
        return Analysis::tree_key(st, c) + "|" + std::to_string(c.k);
    };
    changed("comparison", comparison_key(old) != comparison_key(next));
    changed("groups", old.roles.flags != next.roles.flags);
    const json j0 = to_json(old);
    const json j1 = to_json(next);
    changed("score", j0["score"] != j1["score"] || j0["n_bins"] != j1["n_bins"] ||
                         Analysis::roles_key(old) != Analysis::roles_key(next));
    changed("display", j0["display"] != j1["display"] || j0["hull"] != j1["hull"]);

    s->settings = std::move(next);
    a.retain({&*s->settings});
    update.revision = ++s->revision;
    s->publish("config", {{"revision", update.revision}, {"plan", update.plan}});
    return update;
}

json Service::get_overview(const std::string& id)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return overview_payload(s->ready(), *s->settings, s->settings->clustering);
}

json Service::get_stats(const std::string& id, std::optional<int> k_max)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return stats_payload(s->ready(), *s->settings, k_max);
}

json Service::get_benchmarks(const std::string& id)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return benchmarks_payload(s->ready(), *s->settings);
}

json Service::get_coordinate_view(const std::string& id, const CoordinateViewOptions& opts)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return coordinate_view_payload(s->ready(), *s->settings, opts);
}

json Service::get_breakdown(const std::string& id, int cluster_id)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return breakdown_payload(s->ready(), *s->settings, cluster_id);
}

json Service::get_comparison(const std::string& id)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return comparison_payload(s->ready(), *s->settings);
}

std::string Service::compute_embedding(const std::string& id, const std::string& panel, const json& body)
{
    auto s = find(id);
    const core::Space space = core::space_from_string(panel);
    std::lock_guard lock(s->mu);
    Analysis& a = s->ready();
    const Settings& st = *s->settings;
    NldrSpec spec = (space == core::Space::clustering ? st.nldr_clustering : st.nldr_linked).value_or(NldrSpec{});
    if (body.contains("method")) spec.method = body["method"].get<std::string>();
    if (body.contains("seed")) spec.seed = body["seed"].get<std::uint64_t>();
    if (!registry_.contains(spec.method)) {
        std::string known;
        for (const auto& name : registry_.names()) known += (known.empty() ? "" : ", ") + name;
        throw NotFound("unknown embedding method '" + spec.method + "' (registered: " + known + ")");
    }
    const EmbeddingJobInput in = prepare_embedding(a, st, space, spec);

    auto result_json = [panel](const nldr::Embedding& e, bool cached) {
        json out = nldr::to_json(e);
        out["space"] = panel;
        out["cached"] = cached;
        return out;
    };
    if (const auto it = s->embeddings.find(in.cache_key); it != s->embeddings.end()) {
        return finished_job(*s, "embedding", panel, result_json(*it->second, true));
    }
    const nldr::NldrRegistry* reg = &registry_;
    return start_job(s, "embedding", panel, [in, reg, result_json](JobControl* ctl) -> Commit {
        auto e = std::make_shared<const nldr::Embedding>(
            reg->run(in.method, in.coords->values, *in.distances, in.seed, ctl));
        return [e, key = in.cache_key, result_json](Session& sess) {
            sess.embeddings[key] = e;
            return result_json(*e, false);
        };
    });
}

std::string Service::compute_tour(const std::string& id, const std::string& panel, const json& body)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    Analysis& a = s->ready();
    const Settings& st = *s->settings;
    const std::string color_by = body.value("color_by", std::string("cluster"));
    const std::vector<int> colours = colour_classes(a, st, color_by);

    if (body.contains("copy_from")) {
        const auto src = body["copy_from"].get<std::string>();
        const auto it = s->tours.find(src);
        if (it == s->tours.end()) throw NotFound("panel '" + src + "' has no tour to copy");
        TourRecord copy = it->second;
        copy.color_by = color_by;
        copy.colors = colours;
        s->tours[panel] = copy;
        ++s->revision;
        const std::string key = Analysis::coords_key(st, copy.space);
        return finished_job(*s, "tour", panel, tour_record_json(copy, panel, key));
    }

    json spec_json = st.tour ? to_json(*st.tour) : to_json(TourSpec{});
    json patch = body;
    for (const char* k : {"color_by", "start_from", "copy_from"}) patch.erase(k);
    spec_json.merge_patch(patch);
    const TourSpec spec = tour_spec_from_json(spec_json, "/tour");

    std::optional<tour::ProjectionFrame> start;
    if (body.contains("start_from")) {
        const json& from = body["start_from"];
        const auto src = from.at("panel").get<std::string>();
        const auto it = s->tours.find(src);
        if (it == s->tours.end()) throw NotFound("panel '" + src + "' has no tour");
        const auto& frames = it->second.path.interpolated;
        const std::size_t pos = from.value("position", frames.size());
        if (pos < 1) throw Error("frame positions start at 1");
        start = tour::hold_frame(it->second.path, pos - 1);
    }
    TourJobInput in = prepare_tour(a, st, spec, start);
    const std::string key = Analysis::coords_key(st, spec.space);
    return start_job(s, "tour", panel,
                     [in = std::move(in), panel, color_by, colours, key](JobControl* ctl) -> Commit {
                         TourRecord rec;
                         rec.path = run_tour(in, ctl);
                         rec.space = in.spec.space;
                         rec.color_by = color_by;
                         rec.colors = colours;
                         rec.coords = in.coords;
                         rec.coords_key = key;
                         return [rec = std::move(rec), panel](Session& sess) {
                             sess.tours[panel] = rec;
                             ++sess.revision;
                             return tour_record_json(rec, panel, rec.coords_key);
                         };
                     });
}

json Service::job_status(const std::string& id, const std::string& job) const
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    const auto it = s->jobs.find(job);
    if (it == s->jobs.end()) throw NotFound("unknown job '" + job + "'");
    const Job& j = *it->second;
    json out{{"id", j.id},
             {"kind", j.kind},
             {"panel", j.panel},
             {"state", to_string(j.state)},
             {"progress", j.ctl.progress.load()}};
    if (j.state == JobState::done) out["result"] = j.result;
    if (j.state == JobState::failed) out["error"] = j.error;
    return out;
}

void Service::cancel_job(const std::string& id, const std::string& job)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    const auto it = s->jobs.find(job);
    if (it == s->jobs.end()) throw NotFound("unknown job '" + job + "'");
    it->second->ctl.cancel = true;
}

json Service::wait_job(const std::string& id, const std::string& job, std::chrono::milliseconds timeout)
{
    auto s = find(id);
    {
        std::unique_lock lock(s->mu);
        const auto it = s->jobs.find(job);
        if (it == s->jobs.end()) throw NotFound("unknown job '" + job + "'");
        auto j = it->second;
        s->job_cv.wait_for(lock, timeout, [&] { return j->state != JobState::running; });
    }
    return job_status(id, job);
}

json Service::hold_frame(const std::string& id, const std::string& panel, std::size_t position,
                         bool with_slice, std::optional<double> slice_h)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    const auto it = s->tours.find(panel);
    if (it == s->tours.end()) throw NotFound("panel '" + panel + "' has no tour");
    const TourRecord& rec = it->second;
    if (position < 1) throw Error("frame positions start at 1");
    const tour::ProjectionFrame frame = tour::hold_frame(rec.path, position - 1);
    const Matrix proj = tour::project(rec.coords, frame);
    json points = json::array();
    for (Eigen::Index i = 0; i < proj.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < proj.cols(); ++c) row.push_back(proj(i, c));
        points.push_back(std::move(row));
    }
    json out{{"panel", panel},
             {"position", position},
             {"n_frames", rec.path.interpolated.size()},
             {"frame", tour::frame_to_json(frame)},
             {"projection", std::move(points)},
             {"colors", rec.colors}};
    if (with_slice) {
        const auto sl = tour::slice_mask(rec.coords, frame, slice_h);
        out["slice"] = {{"h", sl.h}, {"distances", sl.distances}, {"in_slice", sl.in_slice}};
    }
    return out;
}

std::uint64_t Service::set_selection(const std::string& id, const std::vector<long>& ids,
                                     const std::string& origin)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    s->ready();
    const long n = static_cast<long>(s->input->table.n_rows());
    for (long v : ids) {
        if (v < 1 || v > n) {
            throw Error("observation id " + std::to_string(v) + " outside 1.." + std::to_string(n));
        }
    }
    std::vector<long> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    s->selection = std::move(sorted);
    s->selection_origin = origin;
    ++s->selection_revision;
    ++s->revision;
    s->publish("selection", {{"revision", s->selection_revision},
                             {"ids", s->selection},
                             {"origin", origin}});
    return s->selection_revision;
}

json Service::get_selection(const std::string& id) const
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return {{"revision", s->selection_revision}, {"ids", s->selection}, {"origin", s->selection_origin}};
}

std::vector<Event> Service::events_after(const std::string& id, std::uint64_t after,
                                         std::chrono::milliseconds timeout) const
{
    auto s = find(id);
    std::unique_lock lock(s->ev_mu);
    s->ev_cv.wait_for(lock, timeout, [&] { return s->events.size() > after; });
    if (s->events.size() <= after) return {};
    return {s->events.begin() + static_cast<std::ptrdiff_t>(after), s->events.end()};
}

ExportBundle Service::export_results(const std::string& id)
{
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return build_bundle(s->ready(), *s->settings, registry_, false);
}

} // namespace twinspace::session
