#include "twinspace/core/coords.hpp"

#include "twinspace/error.hpp"

#include <cmath>

namespace twinspace::core {

const char* to_string(Space s)
{
    return s == Space::clustering ? "clustering" : "linked";
}

Space space_from_string(const std::string& s)
{
    if (s == "clustering") return Space::clustering;
    if (s == "linked") return Space::linked;
    throw Error("unknown space '" + s + "'");
}

CovarianceSpec::CovarianceSpec(Matrix matrix, Vector reference)
    : matrix_(std::move(matrix)), reference_(std::move(reference))
{
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
        throw Error("covariance matrix must be square and non-empty");
    }
    if (reference_.size() != matrix_.rows()) {
        throw Error("reference point has length " + std::to_string(reference_.size()) +
                    ", expected " + std::to_string(matrix_.rows()));
    }
    if (!matrix_.allFinite() || !reference_.allFinite()) {
        throw Error("covariance specification contains non-finite values");
    }
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw Error("covariance matrix is not symmetric");
    }
    const Matrix sym = 0.5 * (matrix_ + matrix_.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || !(lo > 1e-10 * hi)) {
        throw Error("covariance matrix is singular or not positive definite");
    }
    matrix_ = sym;
    inverse_ = sym.llt().solve(Matrix::Identity(sym.rows(), sym.cols()));
    inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
}

CoordinateMatrix center_scale_coords(const Matrix& m, bool center, bool scale, Space space,
                                     const std::vector<std::string>& names)
{
    CoordinateMatrix out;
    out.space = space;
    out.transform_id = center && scale ? "center+scale" : center ? "center" : scale ? "scale" : "raw";
    out.values = m;
    const auto n = m.rows();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double mean = m.col(j).mean();
        if (scale) {
            double ss = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) ss += (m(i, j) - mean) * (m(i, j) - mean);
            const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
            if (!(sd > 0.0)) {
                const std::string name = static_cast<std::size_t>(j) < names.size()
                                             ? names[j]
                                             : "#" + std::to_string(j + 1);
                throw Error("column '" + name + "' is constant and cannot be scaled");
            }
            if (center) {
                out.values.col(j) = (m.col(j).array() - mean) / sd;
            } else {
                out.values.col(j) = m.col(j) / sd;
            }
        } else if (center) {
            out.values.col(j) = m.col(j).array() - mean;
        }
    }
    return out;
}

CoordinateMatrix pull_coords(const Matrix& m, const CovarianceSpec& cov, Space space)
{
    if (m.cols() != cov.dim()) {
        throw Error("data has " + std::to_string(m.cols()) + " columns but covariance is " +
                    std::to_string(cov.dim()) + "x" + std::to_string(cov.dim()));
    }
    const Matrix& inv = cov.inverse();
    const Matrix resid = m.rowwise() - cov.reference().transpose();
    CoordinateMatrix out;
    out.space = space;
    out.transform_id = "pull";
    // inv is symmetric, so row k of resid * inv holds sum_j' inv(j, j') r(k, j').
    out.values = resid * inv;
    for (Eigen::Index j = 0; j < inv.rows(); ++j) {
        out.values.col(j) /= std::sqrt(inv(j, j));
    }
    return out;
}

} // namespace twinspace::core
