#pragma once

#include "twinspace/cluster/distance.hpp"
#include "twinspace/nldr/embedding.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace twinspace::nldr {

inline constexpr int kCalibrationIterations = 64;
inline constexpr double kEntropyTolerance = 1e-5;

struct Calibration {
    std::vector<double> probabilities;
    double beta = 0.0;    // precision of the Gaussian kernel on squared distances
    double entropy = 0.0; // in bits
};

// Conditional probabilities p_j ~ exp(-beta * d_j^2) with beta chosen by
// bisection so that 2^entropy matches the perplexity.
Calibration perplexity_calibration(const std::vector<double>& distances, double perplexity);

struct TsneOptions {
    double perplexity = 30.0; // capped at (n-1)/3
    int iterations = 1000;
    double learning_rate = 200.0;
    double exaggeration = 12.0;
    int exaggeration_iters = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch = 250;
    std::uint64_t seed = 0;
};

// Joint probabilities P with entries (p_{j|i} + p_{i|j}) / 2n.
Matrix joint_probabilities(const cluster::DistanceMatrix& d, double perplexity);

double effective_perplexity(const TsneOptions& opts, Eigen::Index n);

// KL(P || Q) for a low-dimensional layout under the Student-t kernel.
double kl_divergence(const Matrix& p, const Matrix& y);

// Optional hook observing the layout after each iteration (1-based).
using TsneObserver = std::function<void(int iteration, const Matrix& y)>;

// Exact t-SNE on a distance matrix. `ids` seed the initial layout per
// observation (defaults to 0..n-1) so permuted inputs start from permuted layouts.
Embedding tsne(const cluster::DistanceMatrix& d, const TsneOptions& opts = {},
               const std::vector<std::uint64_t>* ids = nullptr, JobControl* ctl = nullptr,
               const TsneObserver& observer = {});

} // namespace twinspace::nldr
