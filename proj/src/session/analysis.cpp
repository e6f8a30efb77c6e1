#include "twinspace/session/analysis.hpp"

#include "twinspace/cluster/hull.hpp"
#include "twinspace/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace twinspace::session {

using nlohmann::json;

Analysis::Analysis(std::shared_ptr<const InputData> input) : input_(std::move(input)) {}

std::string Analysis::roles_key(const Settings& s)
{
    return to_json(s)["roles"].dump();
}

std::string Analysis::coords_key(const Settings& s, core::Space space)
{
    return roles_key(s) + "|" + core::to_string(space) + "|" + to_json(s.transform(space)).dump();
}

std::string Analysis::distances_key(const Settings& s, core::Space space, cluster::Metric metric)
{
    if (space == core::Space::clustering && s.precomputed_distances) return "precomputed";
    return coords_key(s, space) + "|" + cluster::to_string(metric);
}

std::string Analysis::tree_key(const Settings& s, const ClusterSetting& c)
{
    return distances_key(s, core::Space::clustering, c.metric) + "|" + cluster::to_string(c.linkage);
}

std::shared_ptr<const core::SpacedDataset> Analysis::spaced(const Settings& s)
{
    const auto key = roles_key(s);
    auto& slot = spaced_[key];
    if (!slot) slot = std::make_shared<core::SpacedDataset>(core::assign_roles(input_->table, s.roles));
    return slot;
}

std::shared_ptr<const core::CoordinateMatrix> Analysis::coords(const Settings& s, core::Space space)
{
    const auto key = coords_key(s, space);
    auto& slot = coords_[key];
    if (slot) return slot;
    const auto data = spaced(s);
    const bool clustering = space == core::Space::clustering;
    const Matrix& raw = clustering ? data->clustering : data->linked;
    const auto& names = clustering ? data->clustering_names : data->linked_names;
    const TransformSpec& t = s.transform(space);
    core::CoordinateMatrix out;
    switch (t.kind) {
    case TransformKind::none: out = core::center_scale_coords(raw, false, false, space, names); break;
    case TransformKind::center_scale: out = core::center_scale_coords(raw, t.center, t.scale, space, names); break;
    case TransformKind::pull: out = core::pull_coords(raw, *t.covariance, space); break;
    }
    slot = std::make_shared<core::CoordinateMatrix>(std::move(out));
    return slot;
}

std::shared_ptr<const cluster::DistanceMatrix> Analysis::distances(const Settings& s, core::Space space,
                                                                   cluster::Metric metric)
{
    const auto key = distances_key(s, space, metric);
    auto& slot = distances_[key];
    if (slot) return slot;
    if (key == "precomputed") {
        if (!input_->precomputed) throw Error("settings ask for precomputed distances but none were supplied");
        if (input_->precomputed->n() != static_cast<Eigen::Index>(input_->table.n_rows())) {
            throw Error("precomputed distance matrix does not match the number of observations");
        }
        slot = std::make_shared<cluster::DistanceMatrix>(*input_->precomputed);
    } else {
        slot = std::make_shared<cluster::DistanceMatrix>(
            cluster::pairwise_distances(coords(s, space)->values, metric));
    }
    return slot;
}

std::shared_ptr<const cluster::MergeTree> Analysis::tree(const Settings& s, const ClusterSetting& c)
{
    const auto key = tree_key(s, c);
    auto& slot = trees_[key];
    if (!slot) {
        slot = std::make_shared<cluster::MergeTree>(
            cluster::hclust(*distances(s, core::Space::clustering, c.metric), c.linkage));
    }
    return slot;
}

cluster::ClusterSolution Analysis::solution(const Settings& s, const ClusterSetting& c)
{
    const auto t = tree(s, c);
    cluster::ClusterSolution sol = cluster::cut_tree(*t, c.k);
    sol.settings.metric_id = s.precomputed_distances ? "precomputed" : cluster::to_string(c.metric);
    sol.settings.linkage_id = cluster::to_string(c.linkage);
    sol.settings.transform_id = coords(s, core::Space::clustering)->transform_id;
    sol.settings.k = c.k;
    return sol;
}

std::optional<core::GroupAssignment> Analysis::groups(const Settings& s)
{
    if (s.roles.flags.empty()) return std::nullopt;
    return core::cross_groups(spaced(s)->flag_columns);
}

std::optional<core::ScoreVector> Analysis::score(const Settings& s)
{
    if (!s.score) return std::nullopt;
    const auto data = spaced(s);
    if (s.score->kind == ScoreKind::chi2) {
        auto sv = core::chi2_score(data->clustering, *s.clustering_transform.covariance);
        sv.name = s.score->name;
        return sv;
    }
    auto lookup = [&](const std::vector<std::string>& names, const Matrix& m) -> std::optional<std::vector<double>> {
        const auto it = std::find(names.begin(), names.end(), s.score->column);
        if (it == names.end()) return std::nullopt;
        const Vector col = m.col(it - names.begin());
        return std::vector<double>(col.data(), col.data() + col.size());
    };
    auto values = lookup(data->extras_names, data->extras);
    if (!values) values = lookup(data->linked_names, data->linked);
    if (!values) values = lookup(data->clustering_names, data->clustering);
    if (!values) throw Error("score column '" + s.score->column + "' is not numeric");
    return core::external_score(*values, s.score->name, data->n);
}

std::optional<core::BinAssignment> Analysis::bins(const Settings& s)
{
    const auto sc = score(s);
    if (!sc) return std::nullopt;
    return core::quantile_bins(*sc, s.n_bins);
}

void Analysis::retain(const std::vector<const Settings*>& live)
{
    std::set<std::string> keep;
    for (const Settings* s : live) {
        keep.insert(roles_key(*s));
        for (auto space : {core::Space::clustering, core::Space::linked}) {
            keep.insert(coords_key(*s, space));
            for (auto m : {cluster::Metric::euclidean, cluster::Metric::manhattan, cluster::Metric::maximum}) {
                keep.insert(distances_key(*s, space, m));
            }
        }
        keep.insert(tree_key(*s, s->clustering));
        if (s->comparison) keep.insert(tree_key(*s, *s->comparison));
    }
    auto prune = [&](auto& cache) {
        for (auto it = cache.begin(); it != cache.end();) {
            it = keep.count(it->first) ? std::next(it) : cache.erase(it);
        }
    };
    prune(spaced_);
    prune(coords_);
    prune(distances_);
    prune(trees_);
}

std::set<std::string> Analysis::cached_keys() const
{
    std::set<std::string> out;
    for (const auto& [k, v] : spaced_) out.insert("spaced:" + k);
    for (const auto& [k, v] : coords_) out.insert("coords:" + k);
    for (const auto& [k, v] : distances_) out.insert("distances:" + k);
    for (const auto& [k, v] : trees_) out.insert("tree:" + k);
    return out;
}

std::vector<std::string> observation_ids(const core::SpacedDataset& data)
{
    if (data.labels) return *data.labels;
    std::vector<std::string> ids;
    ids.reserve(data.n);
    for (std::size_t i = 0; i < data.n; ++i) ids.push_back(std::to_string(i + 1));
    return ids;
}

namespace {

Eigen::Index index_of(const std::vector<std::string>& names, const std::string& v)
{
    const auto it = std::find(names.begin(), names.end(), v);
    if (it == names.end()) throw NotFound("unknown variable '" + v + "'");
    return it - names.begin();
}

json row_json(const Matrix& m, Eigen::Index r)
{
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    return row;
}

json merges_json(const cluster::MergeTree& t)
{
    json out = json::array();
    for (const auto& m : t.merges) out.push_back({m.left, m.right, m.height});
    return out;
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& v)
{
    if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

json overview_payload(Analysis& a, const Settings& s, const ClusterSetting& c)
{
    const auto data = a.spaced(s);
    const auto coords = a.coords(s, core::Space::clustering);
    const auto tree = a.tree(s, c);
    const auto sol = a.solution(s, c);
    const auto groups = a.groups(s);
    const auto bins = a.bins(s);
    const auto ids = observation_ids(*data);

    json out;
    out["n"] = data->n;
    out["settings"] = {{"metric", sol.settings.metric_id},
                       {"linkage", sol.settings.linkage_id},
                       {"transform", sol.settings.transform_id},
                       {"k", sol.k}};
    out["tree_hash"] = fnv1a_hex(std::to_string(tree->hash()));

    const auto order = cluster::dendrogram_order(*tree);
    json heat;
    heat["order"] = order;
    heat["variables"] = data->clustering_names;
    json rows = json::array();
    json row_clusters = json::array();
    for (int leaf : order) {
        rows.push_back(row_json(coords->values, leaf - 1));
        row_clusters.push_back(sol.cluster_of[static_cast<std::size_t>(leaf - 1)]);
    }
    heat["rows"] = std::move(rows);
    heat["clusters"] = std::move(row_clusters);
    heat["merges"] = merges_json(*tree);
    out["heatmap"] = std::move(heat);

    const auto xi = index_of(data->linked_names, s.display_x);
    const auto yi = index_of(data->linked_names, s.display_y);
    json points = json::array();
    Matrix xy(static_cast<Eigen::Index>(data->n), 2);
    for (std::size_t i = 0; i < data->n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        xy(r, 0) = data->linked(r, xi);
        xy(r, 1) = data->linked(r, yi);
        json p{{"id", ids[i]}, {"index", i + 1}, {"x", xy(r, 0)}, {"y", xy(r, 1)},
               {"cluster", sol.cluster_of[i]}};
        if (groups) p["group"] = groups->group_of[i];
        if (bins) p["bin"] = bins->bin_of[i];
        points.push_back(std::move(p));
    }
    out["scatter"] = {{"x", s.display_x}, {"y", s.display_y}, {"points", std::move(points)}};
    if (groups) out["group_names"] = groups->group_names;
    if (s.hull) {
        json hulls = json::object();
        for (const auto& [cl, poly] : cluster::convex_hulls(xy, sol.cluster_of)) {
            json verts = json::array();
            for (const auto& v : poly) verts.push_back({v.x, v.y});
            hulls[std::to_string(cl)] = std::move(verts);
        }
        out["hulls"] = std::move(hulls);
    }
    return out;
}

json stats_payload(Analysis& a, const Settings& s, std::optional<int> k_max)
{
    const auto tree = a.tree(s, s.clustering);
    const auto d = a.distances(s, core::Space::clustering, s.clustering.metric);
    const auto coords = a.coords(s, core::Space::clustering);
    json rows = json::array();
    for (const auto& r : cluster::stats_sweep(*tree, *d, coords->values, k_max)) {
        rows.push_back({{"k", r.k},
                        {"ch_index", std::isinf(r.ch_index) ? json("perfect") : json(r.ch_index)},
                        {"wb_ratio", r.wb_ratio},
                        {"avg_silhouette", r.avg_silhouette},
                        {"max_radius", r.max_radius},
                        {"min_benchmark_separation", r.min_benchmark_separation}});
    }
    return {{"rows", std::move(rows)}};
}

namespace {

json benchmark_rows(const cluster::ClusterSolution& sol, const cluster::DistanceMatrix& d,
                    const core::SpacedDataset& data, const std::vector<std::string>& ids,
                    const std::optional<core::ScoreVector>& score,
                    const std::vector<std::string>* names)
{
    json rows = json::array();
    const auto summary = cluster::summarize(sol, d);
    for (std::size_t c = 0; c < summary.size(); ++c) {
        const auto& cs = summary[c];
        json linked = json::object();
        for (std::size_t v = 0; v < data.linked_names.size(); ++v) {
            linked[data.linked_names[v]] = data.linked(cs.benchmark, static_cast<Eigen::Index>(v));
        }
        json row{{"cluster", static_cast<int>(c) + 1},
                 {"benchmark_id", ids[static_cast<std::size_t>(cs.benchmark)]},
                 {"benchmark_index", cs.benchmark + 1},
                 {"size", cs.size},
                 {"radius", cs.radius},
                 {"diameter", cs.diameter},
                 {"linked", std::move(linked)}};
        if (names) row["group"] = (*names)[c];
        if (score) row["score"] = score->values[static_cast<std::size_t>(cs.benchmark)];
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

json benchmarks_payload(Analysis& a, const Settings& s)
{
    const auto data = a.spaced(s);
    const auto d = a.distances(s, core::Space::clustering, s.clustering.metric);
    const auto sol = a.solution(s);
    const auto score = a.score(s);
    const auto ids = observation_ids(*data);
    json out;
    out["clusters"] = benchmark_rows(sol, *d, *data, ids, score, nullptr);
    if (score) out["score_name"] = score->name;
    if (const auto groups = a.groups(s)) {
        cluster::ClusterSolution by_group;
        by_group.cluster_of = groups->group_of;
        by_group.k = static_cast<int>(groups->n_groups());
        out["groups"] = benchmark_rows(by_group, *d, *data, ids, score, &groups->group_names);
    }
    return out;
}

json coordinate_view_payload(Analysis& a, const Settings& s, const CoordinateViewOptions& o)
{
    const auto data = a.spaced(s);
    const auto coords = a.coords(s, core::Space::clustering);
    const auto sol = a.solution(s);
    const auto d = a.distances(s, core::Space::clustering, s.clustering.metric);
    const auto bench = cluster::benchmark_points(sol, *d);
    const auto ids = observation_ids(*data);
    const auto var = index_of(data->clustering_names, o.variable);
    const auto xi = index_of(data->linked_names, s.display_x);
    const auto yi = index_of(data->linked_names, s.display_y);

    json gradient = json::array();
    for (std::size_t i = 0; i < data->n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        gradient.push_back({{"id", ids[i]}, {"index", i + 1}, {"x", data->linked(r, xi)},
                            {"y", data->linked(r, yi)}, {"value", coords->values(r, var)},
                            {"cluster", sol.cluster_of[i]}});
    }

    const Matrix shown = core::center_scale_coords(coords->values, o.center, o.scale,
                                                   core::Space::clustering, data->clustering_names)
                             .values;
    std::vector<char> is_bench(data->n, 0);
    for (int b : bench) is_bench[static_cast<std::size_t>(b)] = 1;
    json rows = json::array();
    for (std::size_t i = 0; i < data->n; ++i) {
        if (o.hidden_clusters.count(sol.cluster_of[i])) continue;
        rows.push_back({{"id", ids[i]}, {"index", i + 1}, {"cluster", sol.cluster_of[i]},
                        {"benchmark", is_bench[i] != 0},
                        {"values", row_json(shown, static_cast<Eigen::Index>(i))}});
    }
    json out;
    out["variable"] = o.variable;
    out["gradient"] = {{"x", s.display_x}, {"y", s.display_y}, {"points", std::move(gradient)}};
    out["pcp"] = {{"variables", data->clustering_names},
                  {"center", o.center},
                  {"scale", o.scale},
                  {"hidden", std::vector<int>(o.hidden_clusters.begin(), o.hidden_clusters.end())},
                  {"rows", std::move(rows)}};
    return out;
}

json breakdown_payload(Analysis& a, const Settings& s, int cluster_id)
{
    const auto d = a.distances(s, core::Space::clustering, s.clustering.metric);
    const auto sol = a.solution(s);
    const auto b = cluster::distance_breakdown(*d, sol, cluster_id);
    auto hist = [](const cluster::Histogram& h) {
        return json{{"edges", h.edges}, {"counts", h.counts}, {"total", h.total}};
    };
    return {{"cluster", cluster_id},
            {"within", hist(b.within)},
            {"between", hist(b.between)},
            {"overall", hist(b.overall)}};
}

json comparison_payload(Analysis& a, const Settings& s)
{
    const ClusterSetting other = s.comparison.value_or(s.clustering);
    const auto sa = a.solution(s, s.clustering);
    const auto sb = a.solution(s, other);
    const Eigen::MatrixXi table = cluster::compare_solutions(sa, sb);
    json rows = json::array();
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < table.cols(); ++j) row.push_back(table(i, j));
        rows.push_back(std::move(row));
    }
    return {{"a", overview_payload(a, s, s.clustering)},
            {"b", overview_payload(a, s, other)},
            {"table", std::move(rows)}};
}

std::vector<int> colour_classes(Analysis& a, const Settings& s, const std::string& colour_by)
{
    if (colour_by == "cluster") return a.solution(s).cluster_of;
    if (colour_by == "group") {
        const auto g = a.groups(s);
        if (!g) throw Error("no grouping flags configured");
        return g->group_of;
    }
    if (colour_by == "bin") {
        const auto b = a.bins(s);
        if (!b) throw Error("no score configured");
        return b->bin_of;
    }
    throw Error("unknown colouring '" + colour_by + "'");
}

std::string assignments_csv(Analysis& a, const Settings& s)
{
    const auto data = a.spaced(s);
    const auto sol = a.solution(s);
    const auto groups = a.groups(s);
    const auto score = a.score(s);
    const auto bins = a.bins(s);
    const auto ids = observation_ids(*data);
    std::string out = "id,cluster,group,score,bin\n";
    for (std::size_t i = 0; i < data->n; ++i) {
        out += csv_field(ids[i]);
        out += ',' + std::to_string(sol.cluster_of[i]) + ',';
        if (groups) out += csv_field(groups->group_names[static_cast<std::size_t>(groups->group_of[i] - 1)]);
        out += ',';
        if (score) out += format_double(score->values[i]);
        out += ',';
        if (bins) out += std::to_string(bins->bin_of[i]);
        out += '\n';
    }
    return out;
}

} // namespace twinspace::session

namespace twinspace::session {

TourJobInput prepare_tour(Analysis& a, const Settings& s, const TourSpec& spec,
                          std::optional<tour::ProjectionFrame> start)
{
    const auto data = a.spaced(s);
    TourJobInput in;
    in.spec = spec;
    in.coords = a.coords(s, spec.space)->values;
    const auto& names = spec.space == core::Space::clustering ? data->clustering_names : data->linked_names;
    const auto p = in.coords.cols();
    if (spec.d < 1 || spec.d > p || (spec.kind == tour::TourKind::grand && spec.d >= p)) {
        throw Error("tour dimension " + std::to_string(spec.d) + " does not fit a " +
                    std::to_string(p) + "-dimensional space");
    }
    if (start && (start->p() != p || start->d() != spec.d)) {
        throw Error("start frame does not match the tour space and dimension");
    }
    in.start = std::move(start);
    if (spec.kind == tour::TourKind::guided) {
        if (!tour::index_defined_for(spec.index.kind, spec.d)) {
            throw Error(std::string("index '") + tour::to_string(spec.index.kind) +
                        "' is not defined for d=" + std::to_string(spec.d));
        }
        in.guide_groups = colour_classes(a, s, spec.guide_by);
        const std::set<int> distinct(in.guide_groups.begin(), in.guide_groups.end());
        if (distinct.size() < 2) throw Error("guided tours need at least two groups");
    }
    if (spec.kind == tour::TourKind::radial) in.variable = index_of(names, spec.variable);
    return in;
}

tour::TourPath run_tour(const TourJobInput& in, JobControl* ctl)
{
    tour::TourPath path;
    switch (in.spec.kind) {
    case tour::TourKind::grand:
        path = tour::grand_tour(in.coords.cols(), in.spec.d, in.spec.n_bases, in.spec.seed);
        break;
    case tour::TourKind::guided: {
        tour::GuidedOptions opts;
        opts.index = in.spec.index;
        opts.d = in.spec.d;
        opts.seed = in.spec.seed;
        opts.max_iter = in.spec.max_iter;
        opts.start = in.start;
        path = tour::guided_tour(in.coords, in.guide_groups, opts, ctl);
        break;
    }
    case tour::TourKind::radial: {
        const tour::ProjectionFrame start = in.start ? *in.start : tour::axis_frame(in.coords.cols(), in.spec.d);
        path = tour::radial_tour(start, in.variable);
        path.seed = in.spec.seed;
        break;
    }
    }
    report_progress(ctl, 1.0);
    return path;
}

json tour_payload(const tour::TourPath& path, const Matrix& coords, const std::vector<int>& colours,
                  const std::string& colour_by, core::Space space)
{
    const tour::ProjectionFrame last = path.interpolated.back();
    const Matrix proj = tour::project(coords, last);
    json projected = json::array();
    for (Eigen::Index i = 0; i < proj.rows(); ++i) projected.push_back(row_json(proj, i));
    return {{"space", core::to_string(space)},
            {"color_by", colour_by},
            {"colors", colours},
            {"path", tour::to_json(path, true)},
            {"n_frames", path.interpolated.size()},
            {"final_frame", tour::frame_to_json(last)},
            {"final_projection", std::move(projected)}};
}

EmbeddingJobInput prepare_embedding(Analysis& a, const Settings& s, core::Space space, const NldrSpec& spec)
{
    EmbeddingJobInput in;
    in.method = spec.method;
    in.seed = spec.seed;
    in.space = space;
    in.coords = a.coords(s, space);
    in.distances = a.distances(s, space, s.clustering.metric);
    in.cache_key = Analysis::distances_key(s, space, s.clustering.metric) + "|" + spec.method + "|" +
                   std::to_string(spec.seed);
    return in;
}

ExportBundle build_bundle(Analysis& a, const Settings& s, const nldr::NldrRegistry& registry,
                          bool with_plots)
{
    ExportBundle b;
    b.assignments_csv = assignments_csv(a, s);
    b.settings = canonical(s);
    if (!with_plots) return b;
    b.plots["overview"] = overview_payload(a, s, s.clustering);
    b.plots["stats"] = stats_payload(a, s, std::nullopt);
    b.plots["benchmarks"] = benchmarks_payload(a, s);
    if (s.comparison) b.plots["comparison"] = comparison_payload(a, s);
    if (s.tour) {
        const auto in = prepare_tour(a, s, *s.tour);
        const auto path = run_tour(in);
        b.plots["tour"] = tour_payload(path, in.coords, colour_classes(a, s, "cluster"), "cluster",
                                       s.tour->space);
    }
    for (auto space : {core::Space::clustering, core::Space::linked}) {
        const auto& spec = space == core::Space::clustering ? s.nldr_clustering : s.nldr_linked;
        if (!spec) continue;
        const auto in = prepare_embedding(a, s, space, *spec);
        auto e = registry.run(in.method, in.coords->values, *in.distances, in.seed);
        json doc = nldr::to_json(e);
        doc["space"] = core::to_string(space);
        b.plots[std::string("embedding_") + core::to_string(space)] = std::move(doc);
    }
    return b;
}

} // namespace twinspace::session
