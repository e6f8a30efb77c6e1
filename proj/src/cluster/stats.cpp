#include "twinspace/cluster/stats.hpp"

#include "twinspace/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twinspace::cluster {

namespace {

void check_size(const ClusterSolution& sol, const DistanceMatrix& d)
{
    if (static_cast<Eigen::Index>(sol.n()) != d.n()) {
        throw Error("solution covers " + std::to_string(sol.n()) + " observations, distances " +
                    std::to_string(d.n()));
    }
}

} // namespace

std::vector<int> benchmark_points(const ClusterSolution& sol, const DistanceMatrix& d)
{
    check_size(sol, d);
    std::vector<int> out;
    for (const auto& members : sol.members()) {
        int best = -1;
        double best_f = 0.0;
        for (int c : members) {
            double f = 0.0;
            for (int a : members) f += d(c, a) * d(c, a);
            if (best < 0 || f < best_f) {
                best = c;
                best_f = f;
            }
        }
        out.push_back(best);
    }
    return out;
}

std::vector<double> cluster_radius(const ClusterSolution& sol, const DistanceMatrix& d,
                                   const std::vector<int>& benchmarks)
{
    check_size(sol, d);
    std::vector<double> out;
    const auto groups = sol.members();
    for (std::size_t c = 0; c < groups.size(); ++c) {
        double r = 0.0;
        for (int a : groups[c]) r = std::max(r, d(benchmarks.at(c), a));
        out.push_back(r);
    }
    return out;
}

std::vector<double> cluster_diameter(const ClusterSolution& sol, const DistanceMatrix& d)
{
    check_size(sol, d);
    std::vector<double> out;
    for (const auto& members : sol.members()) {
        double diam = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                diam = std::max(diam, d(members[i], members[j]));
            }
        }
        out.push_back(diam);
    }
    return out;
}

double ch_index(const Matrix& coords, const ClusterSolution& sol)
{
    const auto n = static_cast<int>(sol.n());
    if (coords.rows() != n) throw Error("coordinates and solution differ in size");
    if (sol.k < 2 || sol.k > n - 1) {
        throw Error("CH index needs 2 <= k <= n-1, got k=" + std::to_string(sol.k));
    }
    const Vector grand = coords.colwise().mean().transpose();
    double within = 0.0;
    double between = 0.0;
    for (const auto& members : sol.members()) {
        Vector mean = Vector::Zero(coords.cols());
        for (int a : members) mean += coords.row(a).transpose();
        mean /= static_cast<double>(members.size());
        for (int a : members) within += (coords.row(a).transpose() - mean).squaredNorm();
        between += static_cast<double>(members.size()) * (mean - grand).squaredNorm();
    }
    if (within == 0.0) return std::numeric_limits<double>::infinity();
    return (between / (sol.k - 1)) / (within / (n - sol.k));
}

double wb_ratio(const DistanceMatrix& d, const ClusterSolution& sol)
{
    check_size(sol, d);
    double within = 0.0;
    double between = 0.0;
    long n_within = 0;
    long n_between = 0;
    for (Eigen::Index a = 0; a < d.n(); ++a) {
        for (Eigen::Index b = a + 1; b < d.n(); ++b) {
            if (sol.cluster_of[a] == sol.cluster_of[b]) {
                within += d(a, b);
                ++n_within;
            } else {
                between += d(a, b);
                ++n_between;
            }
        }
    }
    if (n_within == 0) throw Error("WB ratio undefined: no within-cluster pairs");
    if (n_between == 0) throw Error("WB ratio undefined: no between-cluster pairs");
    return (within / n_within) / (between / n_between);
}

Silhouette silhouette(const DistanceMatrix& d, const ClusterSolution& sol)
{
    check_size(sol, d);
    if (sol.k < 2) throw Error("silhouette needs at least two clusters");
    const auto n = d.n();
    std::vector<int> sizes(static_cast<std::size_t>(sol.k), 0);
    for (int c : sol.cluster_of) ++sizes[c - 1];

    Silhouette out;
    out.width.resize(static_cast<std::size_t>(n));
    std::vector<double> sums(static_cast<std::size_t>(sol.k));
    for (Eigen::Index a = 0; a < n; ++a) {
        const int own = sol.cluster_of[a] - 1;
        if (sizes[own] == 1) {
            out.width[a] = 0.0;
            continue;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (Eigen::Index b = 0; b < n; ++b) sums[sol.cluster_of[b] - 1] += d(a, b);
        const double in = sums[own] / (sizes[own] - 1);
        double out_min = std::numeric_limits<double>::infinity();
        for (int c = 0; c < sol.k; ++c) {
            if (c != own) out_min = std::min(out_min, sums[c] / sizes[c]);
        }
        const double denom = std::max(in, out_min);
        out.width[a] = denom > 0.0 ? (out_min - in) / denom : 0.0;
    }
    double total = 0.0;
    for (double w : out.width) total += w;
    out.average = total / static_cast<double>(n);
    return out;
}

double min_benchmark_separation(const DistanceMatrix& d, const std::vector<int>& benchmarks)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < benchmarks.size(); ++i) {
        for (std::size_t j = i + 1; j < benchmarks.size(); ++j) {
            best = std::min(best, d(benchmarks[i], benchmarks[j]));
        }
    }
    return best;
}

std::vector<ClusterSummary> summarize(const ClusterSolution& sol, const DistanceMatrix& d)
{
    const auto bench = benchmark_points(sol, d);
    const auto radius = cluster_radius(sol, d, bench);
    const auto diameter = cluster_diameter(sol, d);
    std::vector<ClusterSummary> out(bench.size());
    for (std::size_t c = 0; c < bench.size(); ++c) {
        out[c] = {bench[c], radius[c], diameter[c], 0};
    }
    for (int c : sol.cluster_of) ++out[static_cast<std::size_t>(c - 1)].size;
    return out;
}

std::vector<StatsRow> stats_sweep(const MergeTree& t, const DistanceMatrix& d, const Matrix& coords,
                                  std::optional<int> k_max)
{
    const int limit = std::min(k_max.value_or(kDefaultMaxClusters), t.n - 1);
    std::vector<StatsRow> rows;
    for (int k = 2; k <= limit; ++k) {
        const ClusterSolution sol = cut_tree(t, k);
        const auto bench = benchmark_points(sol, d);
        const auto radius = cluster_radius(sol, d, bench);
        StatsRow row;
        row.k = k;
        row.ch_index = ch_index(coords, sol);
        row.wb_ratio = wb_ratio(d, sol);
        row.avg_silhouette = silhouette(d, sol).average;
        row.max_radius = *std::max_element(radius.begin(), radius.end());
        row.min_benchmark_separation = min_benchmark_separation(d, bench);
        rows.push_back(row);
    }
    return rows;
}

DistanceBreakdown distance_breakdown(const DistanceMatrix& d, const ClusterSolution& sol,
                                     int cluster_id)
{
    check_size(sol, d);
    if (cluster_id < 1 || cluster_id > sol.k) {
        throw NotFound("cluster " + std::to_string(cluster_id) + " does not exist");
    }
    const auto n = d.n();
    double top = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) top = std::max(top, d(a, b));
    }
    const double upper = top > 0.0 ? top : 1.0;

    auto blank = [&] {
        Histogram h;
        h.counts.assign(kBreakdownBins, 0);
        for (int i = 0; i <= kBreakdownBins; ++i) h.edges.push_back(upper * i / kBreakdownBins);
        return h;
    };
    DistanceBreakdown out{blank(), blank(), blank()};
    auto add = [&](Histogram& h, double v) {
        auto bin = static_cast<int>(v / upper * kBreakdownBins);
        bin = std::clamp(bin, 0, kBreakdownBins - 1);
        ++h.counts[static_cast<std::size_t>(bin)];
        ++h.total;
    };
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double v = d(a, b);
            add(out.overall, v);
            const bool in_a = sol.cluster_of[a] == cluster_id;
            const bool in_b = sol.cluster_of[b] == cluster_id;
            if (in_a && in_b) {
                add(out.within, v);
            } else if (in_a != in_b) {
                add(out.between, v);
            }
        }
    }
    return out;
}

Eigen::MatrixXi compare_solutions(const ClusterSolution& a, const ClusterSolution& b)
{
    if (a.n() != b.n()) {
        throw Error("solutions cover " + std::to_string(a.n()) + " and " + std::to_string(b.n()) +
                    " observations");
    }
    Eigen::MatrixXi table = Eigen::MatrixXi::Zero(a.k, b.k);
    for (std::size_t i = 0; i < a.n(); ++i) ++table(a.cluster_of[i] - 1, b.cluster_of[i] - 1);
    return table;
}

} // namespace twinspace::cluster
