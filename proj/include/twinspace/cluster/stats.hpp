#pragma once

#include "twinspace/cluster/distance.hpp"
#include "twinspace/cluster/hclust.hpp"

#include <optional>
#include <vector>

namespace twinspace::cluster {

// Per cluster, the member minimizing the sum of squared distances to all
// members; the lowest observation index wins ties. Indices are 0-based.
std::vector<int> benchmark_points(const ClusterSolution& sol, const DistanceMatrix& d);

std::vector<double> cluster_radius(const ClusterSolution& sol, const DistanceMatrix& d,
                                   const std::vector<int>& benchmarks);

std::vector<double> cluster_diameter(const ClusterSolution& sol, const DistanceMatrix& d);

// Calinski-Harabasz on Euclidean geometry of `coords`. Returns +inf when the
// within-cluster scatter is zero.
double ch_index(const Matrix& coords, const ClusterSolution& sol);

double wb_ratio(const DistanceMatrix& d, const ClusterSolution& sol);

struct Silhouette {
    std::vector<double> width;
    double average = 0.0;
};

Silhouette silhouette(const DistanceMatrix& d, const ClusterSolution& sol);

double min_benchmark_separation(const DistanceMatrix& d, const std::vector<int>& benchmarks);

struct ClusterSummary {
    int benchmark = 0; // 0-based observation
    double radius = 0.0;
    double diameter = 0.0;
    int size = 0;
};

std::vector<ClusterSummary> summarize(const ClusterSolution& sol, const DistanceMatrix& d);

struct StatsRow {
    int k = 0;
    double ch_index = 0.0;
    double wb_ratio = 0.0;
    double avg_silhouette = 0.0;
    double max_radius = 0.0;
    double min_benchmark_separation = 0.0;
};

inline constexpr int kDefaultMaxClusters = 8;

// Rows for k = 2..k_max; k_max defaults to min(8, n-1) and is clamped to n-1.
std::vector<StatsRow> stats_sweep(const MergeTree& t, const DistanceMatrix& d,
                                  const Matrix& coords, std::optional<int> k_max = {});

struct Histogram {
    std::vector<double> edges; // bins + 1 values
    std::vector<long> counts;
    long total = 0;
};

struct DistanceBreakdown {
    Histogram within;
    Histogram between;
    Histogram overall;
};

inline constexpr int kBreakdownBins = 30;

// `cluster_id` is 1-based. All three histograms share 30 bins on [0, max distance].
DistanceBreakdown distance_breakdown(const DistanceMatrix& d, const ClusterSolution& sol,
                                     int cluster_id);

// counts(i, j) = number of observations in cluster i+1 of `a` and j+1 of `b`.
Eigen::MatrixXi compare_solutions(const ClusterSolution& a, const ClusterSolution& b);

} // namespace twinspace::cluster
