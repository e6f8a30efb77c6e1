#include "twinspace/tour/slice.hpp"

#include "twinspace/error.hpp"

#include <algorithm>
#include <cmath>

namespace twinspace::tour {

SliceResult slice_mask(const Matrix& coords, const ProjectionFrame& f, std::optional<double> h)
{
    if (coords.cols() != f.p()) throw Error("data and frame dimensions differ");
    if (h && !(*h > 0.0)) throw Error("slice thickness must be positive");
    const Matrix centered = coords.rowwise() - coords.colwise().mean();
    const Matrix& b = f.basis();
    const Matrix resid = centered - (centered * b) * b.transpose();

    SliceResult out;
    const auto n = static_cast<std::size_t>(coords.rows());
    out.distances.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.distances[i] = resid.row(static_cast<Eigen::Index>(i)).norm();

    if (h) {
        out.h = *h;
    } else if (n > 0) {
        std::vector<double> sorted = out.distances;
        std::sort(sorted.begin(), sorted.end());
        const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kAutoSliceFraction * n - 1e-9)));
        const double edge = sorted[m - 1];
        const auto above = std::upper_bound(sorted.begin(), sorted.end(), edge);
        // Halfway to the next distinct distance keeps every tie at the edge inside.
        out.h = above != sorted.end() ? 0.5 * (edge + *above)
                                      : edge + std::max(1.0, edge) * 1e-9;
        if (!(out.h > 0.0)) out.h = 1e-12;
    }
    out.in_slice.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.in_slice[i] = out.distances[i] < out.h;
    return out;
}

} // namespace twinspace::tour
