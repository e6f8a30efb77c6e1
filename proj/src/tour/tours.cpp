#include "twinspace/tour/tours.hpp"

#include "twinspace/error.hpp"

#include <algorithm>
#include <cmath>

namespace twinspace::tour {

const char* to_string(TourKind k)
{
    switch (k) {
    case TourKind::grand: return "grand";
    case TourKind::guided: return "guided";
    case TourKind::radial: return "radial";
    }
    return "?";
}

TourKind tour_kind_from_string(const std::string& s)
{
    if (s == "grand") return TourKind::grand;
    if (s == "guided") return TourKind::guided;
    if (s == "radial") return TourKind::radial;
    throw Error("unknown tour kind '" + s + "'");
}

std::vector<ProjectionFrame> interpolate_path(const std::vector<ProjectionFrame>& bases, double step)
{
    std::vector<ProjectionFrame> out;
    if (bases.empty()) return out;
    out.push_back(bases.front());
    for (std::size_t i = 1; i < bases.size(); ++i) {
        auto seg = geodesic_interpolate(out.back(), bases[i], step);
        out.insert(out.end(), std::make_move_iterator(seg.begin() + 1),
                   std::make_move_iterator(seg.end()));
    }
    return out;
}

ProjectionFrame random_frame(Eigen::Index p, Eigen::Index d, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(p, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) m(i, j) = normal(rng);
    }
    return orthonormalize(m);
}

namespace {

// Bases as actually reached when chaining geodesics, so re-interpolating the
// stored bases reproduces the same frames.
std::vector<ProjectionFrame> reached_bases(const std::vector<ProjectionFrame>& targets, double step,
                                           std::vector<ProjectionFrame>& interpolated)
{
    std::vector<ProjectionFrame> reached;
    interpolated.clear();
    if (targets.empty()) return reached;
    reached.push_back(targets.front());
    interpolated.push_back(targets.front());
    for (std::size_t i = 1; i < targets.size(); ++i) {
        auto seg = geodesic_interpolate(interpolated.back(), targets[i], step);
        interpolated.insert(interpolated.end(), seg.begin() + 1, seg.end());
        reached.push_back(interpolated.back());
    }
    return reached;
}

} // namespace

TourPath grand_tour(Eigen::Index p, Eigen::Index d, int n_bases, std::uint64_t seed, double step)
{
    if (d < 1 || d >= p) throw Error("grand tour needs 1 <= d < p");
    if (n_bases < 1) throw Error("grand tour needs at least one basis");
    std::mt19937_64 rng(seed);
    std::vector<ProjectionFrame> targets;
    for (int i = 0; i < n_bases; ++i) targets.push_back(random_frame(p, d, rng));

    TourPath path;
    path.kind = TourKind::grand;
    path.seed = seed;
    path.step = step;
    path.base_frames = reached_bases(targets, step, path.interpolated);
    return path;
}

TourPath guided_tour(const Matrix& coords, const std::vector<int>& group_of,
                     const GuidedOptions& opts, JobControl* ctl)
{
    const auto p = coords.cols();
    if (opts.d < 1 || opts.d > p) throw Error("guided tour needs 1 <= d <= p");
    if (!index_defined_for(opts.index.kind, opts.d)) {
        throw Error(std::string("index '") + to_string(opts.index.kind) + "' is not defined for d=" +
                    std::to_string(opts.d));
    }
    if (opts.max_iter < 1) throw Error("max_iter must be positive");

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ProjectionFrame current = opts.start ? *opts.start : random_frame(p, opts.d, rng);
    if (current.p() != p || current.d() != opts.d) throw Error("start frame has the wrong shape");

    auto score = [&](const ProjectionFrame& f) {
        return evaluate_index(opts.index, project(coords, f), group_of).value;
    };
    double best = score(current);

    TourPath path;
    path.kind = TourKind::guided;
    path.seed = opts.seed;
    path.step = opts.step;
    path.base_frames.push_back(current);
    path.index_trace.push_back(best);

    double half_angle = opts.initial_half_angle;
    int stall = 0;
    int window = 0;
    const long budget = 50L * opts.max_iter;
    for (long tries = 0; stall < opts.max_iter && tries < budget; ++tries) {
        check_cancel(ctl);
        const ProjectionFrame target = random_frame(p, opts.d, rng);
        const Geodesic toward(current, target);
        const double reach = half_angle * (1.0 - unit(rng));
        const double t = toward.length() > reach ? reach / toward.length() : 1.0;
        ProjectionFrame candidate = toward.at(t);
        const double value = score(candidate);
        if (value > best) {
            best = value;
            current = std::move(candidate);
            path.base_frames.push_back(current);
            path.index_trace.push_back(best);
            stall = 0;
            window = 0;
        } else {
            ++stall;
            half_angle *= opts.cooling;
            if (++window >= opts.restart_window) {
                window = 0;
                half_angle = opts.initial_half_angle;
            }
        }
        report_progress(ctl, static_cast<double>(stall) / opts.max_iter);
    }
    path.base_frames = reached_bases(path.base_frames, opts.step, path.interpolated);
    report_progress(ctl, 1.0);
    return path;
}

namespace {

// Orthonormal basis for the columns of m (row `dropped` already zero),
// completed with coordinate axes other than `dropped` where columns vanish.
ProjectionFrame complete_without(const Matrix& m, Eigen::Index dropped)
{
    const auto p = m.rows();
    const auto d = m.cols();
    Matrix q = Matrix::Zero(p, d);
    auto residual = [&](Vector v, Eigen::Index upto) {
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index i = 0; i < upto; ++i) v -= q.col(i).dot(v) * q.col(i);
        }
        v(dropped) = 0.0;
        return v;
    };
    for (Eigen::Index j = 0; j < d; ++j) {
        Vector v = residual(m.col(j), j);
        if (v.norm() < 1e-10) {
            double best = 0.0;
            for (Eigen::Index axis = 0; axis < p; ++axis) {
                if (axis == dropped) continue;
                Vector cand = residual(Vector::Unit(p, axis), j);
                if (cand.norm() > best + 1e-12) {
                    best = cand.norm();
                    v = cand;
                }
            }
            if (best < 1e-10) throw Error("no room to complete the frame");
        }
        q.col(j) = v / v.norm();
    }
    return ProjectionFrame(std::move(q));
}

} // namespace

TourPath radial_tour(const ProjectionFrame& start, Eigen::Index variable, double step)
{
    if (variable < 0 || variable >= start.p()) {
        throw Error("radial tour variable " + std::to_string(variable + 1) + " outside 1.." +
                    std::to_string(start.p()));
    }
    if (start.p() - 1 < start.d()) {
        throw Error("removing a variable from a " + std::to_string(start.p()) + " x " +
                    std::to_string(start.d()) + " frame leaves rank below d");
    }
    Matrix zeroed = start.basis();
    zeroed.row(variable).setZero();
    const ProjectionFrame target = complete_without(zeroed, variable);

    TourPath path;
    path.kind = TourKind::radial;
    path.step = step;
    auto out = geodesic_interpolate(start, target, step);
    // Pin the removed row at the turning point.
    Matrix mid = out.back().basis();
    mid.row(variable).setZero();
    out.back() = orthonormalize(mid);
    auto back = geodesic_interpolate(out.back(), start, step);
    path.base_frames = {start, out.back(), back.back()};
    out.insert(out.end(), back.begin() + 1, back.end());
    path.interpolated = std::move(out);
    return path;
}

ProjectionFrame hold_frame(const TourPath& path, std::size_t position)
{
    if (position >= path.interpolated.size()) {
        throw Error("frame position " + std::to_string(position + 1) + " outside 1.." +
                    std::to_string(path.interpolated.size()));
    }
    return path.interpolated[position];
}

nlohmann::json frame_to_json(const ProjectionFrame& f)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < f.p(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < f.d(); ++j) row.push_back(f.basis()(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

ProjectionFrame frame_from_json(const nlohmann::json& j)
{
    if (!j.is_array() || j.empty() || !j.front().is_array()) throw Error("frame must be an array of rows");
    const auto p = static_cast<Eigen::Index>(j.size());
    const auto d = static_cast<Eigen::Index>(j.front().size());
    Matrix m(p, d);
    for (Eigen::Index i = 0; i < p; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != d) throw Error("frame rows differ in length");
        for (Eigen::Index c = 0; c < d; ++c) m(i, c) = j[i][c].get<double>();
    }
    return ProjectionFrame(std::move(m));
}

nlohmann::json to_json(const TourPath& path, bool inline_frames)
{
    nlohmann::json j;
    j["kind"] = to_string(path.kind);
    j["seed"] = path.seed;
    j["step"] = path.step;
    if (!path.base_frames.empty()) {
        j["p"] = path.base_frames.front().p();
        j["d"] = path.base_frames.front().d();
    }
    j["base_frames"] = nlohmann::json::array();
    for (const auto& f : path.base_frames) j["base_frames"].push_back(frame_to_json(f));
    j["index_trace"] = path.index_trace;
    if (inline_frames) {
        j["interpolated"] = nlohmann::json::array();
        for (const auto& f : path.interpolated) j["interpolated"].push_back(frame_to_json(f));
    }
    return j;
}

TourPath tour_from_json(const nlohmann::json& j)
{
    TourPath path;
    path.kind = tour_kind_from_string(j.at("kind").get<std::string>());
    path.seed = j.value("seed", std::uint64_t{0});
    path.step = j.value("step", kDefaultStep);
    for (const auto& f : j.at("base_frames")) path.base_frames.push_back(frame_from_json(f));
    path.index_trace = j.value("index_trace", std::vector<double>{});
    if (j.contains("interpolated")) {
        for (const auto& f : j["interpolated"]) path.interpolated.push_back(frame_from_json(f));
    } else {
        path.interpolated = interpolate_path(path.base_frames, path.step);
    }
    return path;
}

} // namespace twinspace::tour
