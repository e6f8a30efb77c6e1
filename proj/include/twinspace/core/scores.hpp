#pragma once

#include "twinspace/common.hpp"
#include "twinspace/core/coords.hpp"

#include <string>
#include <vector>

namespace twinspace::core {

inline constexpr std::size_t kMaxGroups = 13;

struct ScoreVector {
    std::string name;
    std::vector<double> values;
};

struct BinAssignment {
    int n_bins = 0;
    std::vector<int> bin_of;        // 1-based
    std::vector<double> boundaries; // interior upper boundaries, strictly ascending
};

struct GroupAssignment {
    std::vector<int> group_of; // 1-based
    std::vector<std::string> group_names;

    std::size_t n_groups() const noexcept { return group_names.size(); }
};

// (y_k - z)^T inv(Sigma) (y_k - z) for every row.
ScoreVector chi2_score(const Matrix& m, const CovarianceSpec& cov);

ScoreVector external_score(const std::vector<double>& values, std::string name,
                           std::size_t n);

// Linear-interpolation quantile (R type 7) of sorted data.
double quantile_type7(const std::vector<double>& sorted, double q);

// Boundaries at the i/n_bins quantiles; duplicate boundaries are merged so
// trailing bins may end up empty.
BinAssignment quantile_bins(const ScoreVector& s, int n_bins);

// One group per distinct observed combination of flag values, ordered
// lexicographically, named by joining the values with "/".
GroupAssignment cross_groups(const std::vector<std::vector<std::string>>& flags);

} // namespace twinspace::core
