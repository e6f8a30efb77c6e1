#pragma once

#include "twinspace/tour/frame.hpp"
#include "twinspace/tour/index.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace twinspace::tour {

enum class TourKind { grand, guided, radial };

const char* to_string(TourKind k);
TourKind tour_kind_from_string(const std::string& s);

struct TourPath {
    TourKind kind = TourKind::grand;
    std::vector<ProjectionFrame> base_frames;
    std::vector<ProjectionFrame> interpolated;
    std::vector<double> index_trace;
    std::uint64_t seed = 0;
    double step = kDefaultStep;
};

// Chains geodesic segments through consecutive base frames, each segment
// starting where the previous one ended.
std::vector<ProjectionFrame> interpolate_path(const std::vector<ProjectionFrame>& bases,
                                              double step = kDefaultStep);

// Orthonormalized standard normal p x d matrix.
ProjectionFrame random_frame(Eigen::Index p, Eigen::Index d, std::mt19937_64& rng);

inline constexpr int kDefaultBases = 20;

TourPath grand_tour(Eigen::Index p, Eigen::Index d, int n_bases = kDefaultBases,
                    std::uint64_t seed = 0, double step = kDefaultStep);

struct GuidedOptions {
    IndexSpec index;
    Eigen::Index d = 2;
    std::uint64_t seed = 0;
    int max_iter = 500;
    double initial_half_angle = 0.785398163397448; // pi / 4
    double cooling = 0.95;
    int restart_window = 30;
    std::optional<ProjectionFrame> start;
    double step = kDefaultStep;
};

// Stochastic hill climb over frames near the current one; a candidate is
// accepted only when the index strictly increases. Stops after max_iter
// consecutive rejections.
TourPath guided_tour(const Matrix& coords, const std::vector<int>& group_of,
                     const GuidedOptions& opts, JobControl* ctl = nullptr);

// Rotates `variable` (0-based) out of the start frame and back.
TourPath radial_tour(const ProjectionFrame& start, Eigen::Index variable,
                     double step = kDefaultStep);

// Frame at a 0-based position along the interpolated sequence.
ProjectionFrame hold_frame(const TourPath& path, std::size_t position);

nlohmann::json frame_to_json(const ProjectionFrame& f);
ProjectionFrame frame_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TourPath& path, bool inline_frames = false);
// Interpolated frames are recomputed from the base frames when not inlined.
TourPath tour_from_json(const nlohmann::json& j);

} // namespace twinspace::tour
