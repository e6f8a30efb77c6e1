#include "twinspace/nldr/mds.hpp"

#include "twinspace/error.hpp"

#include <cmath>

namespace twinspace::nldr {

Embedding classical_mds(const cluster::DistanceMatrix& d)
{
    const auto n = d.n();
    if (n < 3) throw Error("classical scaling needs at least 3 observations");
    const Matrix sq = d.matrix().cwiseProduct(d.matrix());
    const Vector row_mean = sq.rowwise().mean();
    const double grand = sq.mean();
    Matrix gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            gram(i, j) = -0.5 * (sq(i, j) - row_mean(i) - row_mean(j) + grand);
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const Vector& values = eig.eigenvalues();
    const double top = std::max(0.0, values(n - 1));

    Embedding e;
    e.method_id = "mds";
    e.coords = Matrix::Zero(n, 2);
    int positive = 0;
    for (int c = 0; c < 2; ++c) {
        const double lambda = values(n - 1 - c);
        if (!(top > 0.0) || !(lambda > 1e-10 * top)) continue;
        ++positive;
        Vector v = eig.eigenvectors().col(n - 1 - c);
        Eigen::Index lead = 0;
        v.cwiseAbs().maxCoeff(&lead);
        if (v(lead) < 0.0) v = -v;
        e.coords.col(c) = v * std::sqrt(lambda);
    }
    e.degenerate = positive < 2;
    return e;
}

} // namespace twinspace::nldr
