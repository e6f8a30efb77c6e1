#include "twinspace/tour/index.hpp"

#include "twinspace/error.hpp"

#include <cmath>
#include <map>

namespace twinspace::tour {

namespace {

struct Scatter {
    Matrix within;
    Matrix between;
};

Scatter scatter(const Matrix& x, const std::vector<int>& group_of)
{
    if (x.rows() != static_cast<Eigen::Index>(group_of.size())) {
        throw Error("projected data and group labels differ in length");
    }
    std::map<int, std::vector<Eigen::Index>> groups;
    for (std::size_t i = 0; i < group_of.size(); ++i) {
        groups[group_of[i]].push_back(static_cast<Eigen::Index>(i));
    }
    if (groups.size() < 2) throw Error("projection pursuit index needs at least two groups");

    const auto d = x.cols();
    const Vector grand = x.colwise().mean().transpose();
    Scatter s{Matrix::Zero(d, d), Matrix::Zero(d, d)};
    for (const auto& [g, rows] : groups) {
        Vector mean = Vector::Zero(d);
        for (auto r : rows) mean += x.row(r).transpose();
        mean /= static_cast<double>(rows.size());
        for (auto r : rows) {
            const Vector c = x.row(r).transpose() - mean;
            s.within.noalias() += c * c.transpose();
        }
        const Vector c = mean - grand;
        s.between.noalias() += static_cast<double>(rows.size()) * c * c.transpose();
    }
    return s;
}

IndexValue determinant_ratio(const Matrix& num, const Matrix& den)
{
    const double dd = den.determinant();
    const double scale = den.trace() / static_cast<double>(den.rows());
    if (!(scale > 0.0) || !(dd > 1e-12 * std::pow(scale, static_cast<double>(den.rows())))) {
        return {0.0, true};
    }
    return {1.0 - num.determinant() / dd, false};
}

} // namespace

IndexValue lda_index(const Matrix& projected, const std::vector<int>& group_of)
{
    const Scatter s = scatter(projected, group_of);
    return determinant_ratio(s.within, s.within + s.between);
}

IndexValue pda_index(const Matrix& projected, const std::vector<int>& group_of, double lambda)
{
    if (!(lambda >= 0.0 && lambda < 1.0)) throw Error("PDA lambda must lie in [0, 1)");
    const Scatter s = scatter(projected, group_of);
    const auto d = projected.cols();
    const Matrix ridge = static_cast<double>(projected.rows()) * lambda * Matrix::Identity(d, d);
    return determinant_ratio((1.0 - lambda) * s.within + ridge,
                             (1.0 - lambda) * (s.within + s.between) + ridge);
}

const char* to_string(IndexKind k)
{
    return k == IndexKind::lda ? "lda" : "pda";
}

IndexKind index_from_string(const std::string& s)
{
    if (s == "lda") return IndexKind::lda;
    if (s == "pda") return IndexKind::pda;
    throw Error("unknown projection pursuit index '" + s + "'");
}

bool index_defined_for(IndexKind, Eigen::Index d)
{
    return d >= 1 && d <= 3;
}

IndexValue evaluate_index(const IndexSpec& spec, const Matrix& projected,
                          const std::vector<int>& group_of)
{
    return spec.kind == IndexKind::lda ? lda_index(projected, group_of)
                                       : pda_index(projected, group_of, spec.lambda);
}

} // namespace twinspace::tour
