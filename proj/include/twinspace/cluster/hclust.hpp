#pragma once

#include "twinspace/cluster/distance.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace twinspace::cluster {

enum class Linkage { single, complete, average, ward };

const char* to_string(Linkage l);
Linkage linkage_from_string(const std::string& s);

// Node ids: leaves are 1..n, the node created by merge step s (1-based) is n+s.
struct Merge {
    int left = 0;  // smaller node id
    int right = 0; // larger node id
    double height = 0.0;
};

struct MergeTree {
    int n = 0;
    std::vector<Merge> merges;
    std::string linkage_id;

    // FNV-1a over the merge structure and height bits; identifies a tree in caches.
    std::uint64_t hash() const;
};

struct SolutionSettings {
    std::string metric_id;
    std::string linkage_id;
    std::string transform_id;
    int k = 0;
};

struct ClusterSolution {
    int k = 0;
    std::vector<int> cluster_of; // 1..k, numbered by first occurrence
    SolutionSettings settings;

    std::size_t n() const noexcept { return cluster_of.size(); }
    std::vector<std::vector<int>> members() const; // 0-based observation indices per cluster
};

// Agglomerative clustering with Lance-Williams updates. Ward follows the
// ward.D2 convention: squared distances are updated and heights are
// reported on the distance scale. Equal distances are resolved towards the
// pair with the smallest (min id, max id).
MergeTree hclust(const DistanceMatrix& d, Linkage linkage);

// Applies the first n-k merges.
ClusterSolution cut_tree(const MergeTree& t, int k);

// Relabels an arbitrary labelling to 1..k by first occurrence.
ClusterSolution make_solution(const std::vector<int>& labels);

// Leaf order (1-based ids) from a depth-first walk, lower child id first.
std::vector<int> dendrogram_order(const MergeTree& t);

} // namespace twinspace::cluster
