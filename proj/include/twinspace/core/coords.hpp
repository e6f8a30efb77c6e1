#pragma once

#include "twinspace/common.hpp"

#include <string>

namespace twinspace::core {

enum class Space { clustering, linked };

const char* to_string(Space s);
Space space_from_string(const std::string& s);

struct CoordinateMatrix {
    Matrix values;
    std::string transform_id;
    Space space = Space::clustering;
};

// Symmetric positive definite covariance together with the reference point
// that residuals are measured from. Validated on construction: the smallest
// eigenvalue must exceed 1e-10 times the largest.
class CovarianceSpec {
public:
    CovarianceSpec(Matrix matrix, Vector reference);

    const Matrix& matrix() const noexcept { return matrix_; }
    const Vector& reference() const noexcept { return reference_; }
    const Matrix& inverse() const noexcept { return inverse_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

private:
    Matrix matrix_;
    Vector reference_;
    Matrix inverse_;
};

// Column-wise centering (mean) and scaling (sample sd, n-1 denominator).
CoordinateMatrix center_scale_coords(const Matrix& m, bool center, bool scale,
                                     Space space = Space::clustering,
                                     const std::vector<std::string>& names = {});

// Pull coordinates: out(k, j) = sum_j' inv(j, j') (y(k, j') - z(j')) / sqrt(inv(j, j))
// with inv the inverse covariance and z the reference point.
CoordinateMatrix pull_coords(const Matrix& m, const CovarianceSpec& cov,
                             Space space = Space::clustering);

} // namespace twinspace::core
