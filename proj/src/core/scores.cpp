#include "twinspace/core/scores.hpp"

#include "twinspace/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace twinspace::core {

ScoreVector chi2_score(const Matrix& m, const CovarianceSpec& cov)
{
    if (m.cols() != cov.dim()) {
        throw Error("data has " + std::to_string(m.cols()) + " columns but covariance is " +
                    std::to_string(cov.dim()) + "x" + std::to_string(cov.dim()));
    }
    ScoreVector s{"chi2", std::vector<double>(static_cast<std::size_t>(m.rows()))};
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        const Vector r = m.row(k).transpose() - cov.reference();
        s.values[static_cast<std::size_t>(k)] = r.dot(cov.inverse() * r);
    }
    return s;
}

ScoreVector external_score(const std::vector<double>& values, std::string name, std::size_t n)
{
    if (values.size() != n) {
        throw Error("score '" + name + "' has length " + std::to_string(values.size()) +
                    ", expected " + std::to_string(n));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw Error("score '" + name + "' is not finite at index " + std::to_string(i + 1));
        }
    }
    return ScoreVector{std::move(name), values};
}

double quantile_type7(const std::vector<double>& sorted, double q)
{
    if (sorted.empty()) throw Error("quantile of empty data");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

BinAssignment quantile_bins(const ScoreVector& s, int n_bins)
{
    if (n_bins < 2) throw Error("number of bins must be at least 2");
    if (s.values.size() < static_cast<std::size_t>(n_bins)) {
        throw Error("cannot split " + std::to_string(s.values.size()) + " observations into " +
                    std::to_string(n_bins) + " bins");
    }
    std::vector<double> sorted = s.values;
    std::sort(sorted.begin(), sorted.end());

    BinAssignment out;
    out.n_bins = n_bins;
    for (int i = 1; i < n_bins; ++i) {
        const double b = quantile_type7(sorted, static_cast<double>(i) / n_bins);
        if (out.boundaries.empty() || b > out.boundaries.back()) out.boundaries.push_back(b);
    }
    out.bin_of.reserve(s.values.size());
    for (double v : s.values) {
        const auto it = std::lower_bound(out.boundaries.begin(), out.boundaries.end(), v);
        out.bin_of.push_back(static_cast<int>(it - out.boundaries.begin()) + 1);
    }
    return out;
}

GroupAssignment cross_groups(const std::vector<std::vector<std::string>>& flags)
{
    if (flags.empty()) throw Error("at least one grouping flag is required");
    const std::size_t n = flags.front().size();
    for (const auto& f : flags) {
        if (f.size() != n) throw Error("grouping flags differ in length");
    }
    std::map<std::vector<std::string>, int> combos;
    std::vector<std::string> key(flags.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < flags.size(); ++f) key[f] = flags[f][i];
        combos.emplace(key, 0);
    }
    if (combos.size() > kMaxGroups) {
        throw Error(std::to_string(combos.size()) + " group combinations exceed the display limit of " +
                    std::to_string(kMaxGroups) + " groups");
    }
    GroupAssignment out;
    int next = 1;
    for (auto& [k, id] : combos) {
        id = next++;
        std::string name;
        for (std::size_t f = 0; f < k.size(); ++f) {
            if (f) name += "/";
            name += k[f];
        }
        out.group_names.push_back(std::move(name));
    }
    out.group_of.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < flags.size(); ++f) key[f] = flags[f][i];
        out.group_of.push_back(combos.at(key));
    }
    return out;
}

} // namespace twinspace::core
