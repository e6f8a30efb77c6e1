#include "twinspace/tour/frame.hpp"

#include "twinspace/error.hpp"

#include <algorithm>
#include <cmath>

namespace twinspace::tour {

double orthonormality_error(const Matrix& basis)
{
    const Matrix gram = basis.transpose() * basis;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

ProjectionFrame::ProjectionFrame(Matrix basis) : basis_(std::move(basis))
{
    if (basis_.cols() < 1 || basis_.cols() > basis_.rows()) {
        throw Error("frame must be p x d with 1 <= d <= p, got " + std::to_string(basis_.rows()) +
                    " x " + std::to_string(basis_.cols()));
    }
    const double err = tour::orthonormality_error(basis_);
    if (!(err < kOrthonormalTolerance)) {
        throw Error("frame columns are not orthonormal (error " + std::to_string(err) + ")");
    }
}

double ProjectionFrame::orthonormality_error() const
{
    return tour::orthonormality_error(basis_);
}

ProjectionFrame orthonormalize(const Matrix& m)
{
    if (m.cols() < 1 || m.cols() > m.rows()) throw Error("cannot orthonormalize a p x d matrix with d > p");
    Matrix q = m;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const double original = m.col(j).norm();
        // Two passes keep the result orthogonal to working precision.
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
        }
        const double norm = q.col(j).norm();
        if (!(original > 0.0) || !(norm > 1e-10 * original)) {
            throw Error("matrix is rank deficient at column " + std::to_string(j + 1));
        }
        q.col(j) /= norm;
    }
    return ProjectionFrame(std::move(q));
}

ProjectionFrame axis_frame(Eigen::Index p, Eigen::Index d)
{
    return ProjectionFrame(Matrix::Identity(p, d));
}

Matrix project(const Matrix& coords, const ProjectionFrame& f)
{
    if (coords.cols() != f.p()) {
        throw Error("data has " + std::to_string(coords.cols()) + " columns but frame has " +
                    std::to_string(f.p()) + " rows");
    }
    return coords * f.basis();
}

Vector principal_angles(const ProjectionFrame& f, const ProjectionFrame& g)
{
    if (f.p() != g.p() || f.d() != g.d()) throw Error("frames differ in shape");
    // Cosines alone lose precision for small angles, so pair them with the
    // sines from the part of g orthogonal to f.
    const Matrix cross = f.basis().transpose() * g.basis();
    const Vector cosines = Eigen::JacobiSVD<Matrix>(cross).singularValues();
    const Vector sines = Eigen::JacobiSVD<Matrix>(g.basis() - f.basis() * cross).singularValues();
    const auto d = f.d();
    Vector angles(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        angles(i) = std::atan2(std::min(1.0, sines(d - 1 - i)), std::min(1.0, cosines(i)));
    }
    std::sort(angles.data(), angles.data() + angles.size());
    return angles;
}

Geodesic::Geodesic(const ProjectionFrame& from, const ProjectionFrame& to)
{
    if (from.p() != to.p() || from.d() != to.d()) throw Error("frames differ in shape");
    const Matrix& f = from.basis();
    const Matrix& g = to.basis();
    Eigen::JacobiSVD<Matrix> svd(f.transpose() * g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix& u = svd.matrixU();
    from_aligned_ = f * u;
    const Matrix to_aligned = g * svd.matrixV();
    back_ = u.transpose();

    const auto d = f.cols();
    angles_ = Vector::Zero(d);
    toward_ = Matrix::Zero(f.rows(), d);
    for (Eigen::Index i = 0; i < d; ++i) {
        Vector v = to_aligned.col(i);
        for (int pass = 0; pass < 2; ++pass) {
            v -= from_aligned_ * (from_aligned_.transpose() * v);
            for (Eigen::Index j = 0; j < i; ++j) v -= toward_.col(j).dot(v) * toward_.col(j);
        }
        const double norm = v.norm();
        if (norm < 1e-12) continue; // direction shared by both spans
        toward_.col(i) = v / norm;
        angles_(i) = std::atan2(norm, std::max(0.0, from_aligned_.col(i).dot(to_aligned.col(i))));
    }
    length_ = angles_.norm();
}

ProjectionFrame Geodesic::at(double t) const
{
    Matrix x = from_aligned_;
    for (Eigen::Index i = 0; i < angles_.size(); ++i) {
        const double a = t * angles_(i);
        x.col(i) = std::cos(a) * from_aligned_.col(i) + std::sin(a) * toward_.col(i);
    }
    return ProjectionFrame(x * back_);
}

std::vector<ProjectionFrame> geodesic_interpolate(const ProjectionFrame& f, const ProjectionFrame& g,
                                                  double step)
{
    if (!(step > 0.0)) throw Error("interpolation step must be positive");
    const Geodesic path(f, g);
    std::vector<ProjectionFrame> frames{f};
    if (path.length() < 1e-12) return frames;
    const auto m = static_cast<int>(std::ceil(path.length() / step - 1e-12));
    frames.reserve(static_cast<std::size_t>(m) + 1);
    for (int i = 1; i <= m; ++i) frames.push_back(path.at(static_cast<double>(i) / m));
    return frames;
}

} // namespace twinspace::tour
