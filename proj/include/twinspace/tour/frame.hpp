#pragma once

#include "twinspace/common.hpp"

#include <vector>

namespace twinspace::tour {

inline constexpr double kOrthonormalTolerance = 1e-9;

// A p x d basis with orthonormal columns.
class ProjectionFrame {
public:
    ProjectionFrame() = default;
    // Throws unless ||B^T B - I||_max < kOrthonormalTolerance.
    explicit ProjectionFrame(Matrix basis);

    const Matrix& basis() const noexcept { return basis_; }
    Eigen::Index p() const noexcept { return basis_.rows(); }
    Eigen::Index d() const noexcept { return basis_.cols(); }

    double orthonormality_error() const;

private:
    Matrix basis_;
};

double orthonormality_error(const Matrix& basis);

// Modified Gram-Schmidt; throws on rank-deficient input.
ProjectionFrame orthonormalize(const Matrix& m);

// Identity-prefix frame: the first d coordinate axes.
ProjectionFrame axis_frame(Eigen::Index p, Eigen::Index d);

// coords * basis.
Matrix project(const Matrix& coords, const ProjectionFrame& f);

// Principal angles between the spans of f and g, ascending.
Vector principal_angles(const ProjectionFrame& f, const ProjectionFrame& g);

// Geodesic between the spans of two frames. The path starts at `from`
// exactly and ends at a frame spanning `to`; position t in [0, 1] moves a
// fraction t of the way along every principal angle.
class Geodesic {
public:
    Geodesic(const ProjectionFrame& from, const ProjectionFrame& to);

    ProjectionFrame at(double t) const;
    // Euclidean norm of the principal angles.
    double length() const noexcept { return length_; }

private:
    Matrix from_aligned_; // from * U
    Matrix toward_;       // unit directions orthogonal to from_aligned_
    Vector angles_;
    Matrix back_;         // U^T, returns to the original in-plane orientation
    double length_ = 0.0;
};

inline constexpr double kDefaultStep = 0.05;

// Frames spaced at most `step` radians apart; first is `f`, last spans `g`.
// Equal spans give the single frame `f`.
std::vector<ProjectionFrame> geodesic_interpolate(const ProjectionFrame& f, const ProjectionFrame& g,
                                                  double step = kDefaultStep);

} // namespace twinspace::tour
