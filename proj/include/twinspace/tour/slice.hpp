#pragma once

#include "twinspace/tour/frame.hpp"

#include <optional>
#include <vector>

namespace twinspace::tour {

struct SliceResult {
    std::vector<double> distances;
    std::vector<bool> in_slice;
    double h = 0.0;
};

inline constexpr double kAutoSliceFraction = 0.2;

// Orthogonal distance of each mean-centered row to the span of f. Without
// an explicit h, the thickness is chosen so 20% of rows are in the slice.
SliceResult slice_mask(const Matrix& coords, const ProjectionFrame& f,
                       std::optional<double> h = std::nullopt);

} // namespace twinspace::tour
