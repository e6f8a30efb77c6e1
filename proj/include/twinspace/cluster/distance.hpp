#pragma once

#include "twinspace/common.hpp"

#include <string>

namespace twinspace::cluster {

enum class Metric { euclidean, manhattan, maximum };

const char* to_string(Metric m);
Metric metric_from_string(const std::string& s);

// Symmetric, zero-diagonal, finite and non-negative. The checked constructor
// accepts user-supplied matrices (symmetric within 1e-9, diagonal within
// 1e-12) and stores the symmetrized version.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(Matrix d, std::string metric_id);

    Eigen::Index n() const noexcept { return d_.rows(); }
    double operator()(Eigen::Index a, Eigen::Index b) const { return d_(a, b); }
    const Matrix& matrix() const noexcept { return d_; }
    const std::string& metric_id() const noexcept { return metric_id_; }

private:
    Matrix d_;
    std::string metric_id_;
};

// Distances between the rows of `coords`.
DistanceMatrix pairwise_distances(const Matrix& coords, Metric metric);

// Precomputed n x n distance matrix as comma-separated numbers, no header.
DistanceMatrix parse_distance_csv(const std::string& text);

} // namespace twinspace::cluster
