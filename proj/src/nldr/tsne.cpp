#include "twinspace/nldr/tsne.hpp"

#include "twinspace/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace twinspace::nldr {

namespace {

struct RowEntropy {
    double entropy_bits;
    std::vector<double> p;
};

RowEntropy evaluate(const std::vector<double>& shifted, double beta)
{
    RowEntropy out{0.0, std::vector<double>(shifted.size())};
    double sum = 0.0;
    for (std::size_t j = 0; j < shifted.size(); ++j) {
        out.p[j] = std::exp(-beta * shifted[j]);
        sum += out.p[j];
    }
    for (double& v : out.p) {
        v /= sum;
        if (v > 0.0) out.entropy_bits -= v * std::log2(v);
    }
    return out;
}

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

Calibration perplexity_calibration(const std::vector<double>& distances, double perplexity)
{
    const auto m = distances.size();
    if (m == 0) throw Error("perplexity calibration needs at least one neighbour");
    if (!(perplexity >= 1.0) || perplexity > static_cast<double>(m)) {
        throw Error("perplexity " + std::to_string(perplexity) + " outside [1, " +
                    std::to_string(m) + "]");
    }
    const double target = std::log2(perplexity);

    // Shifting by the smallest squared distance leaves the normalized
    // probabilities unchanged and avoids underflow.
    double lo_sq = distances.front() * distances.front();
    for (double v : distances) lo_sq = std::min(lo_sq, v * v);
    std::vector<double> shifted(m);
    double span = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        shifted[j] = distances[j] * distances[j] - lo_sq;
        span = std::max(span, shifted[j]);
    }

    Calibration cal;
    if (span == 0.0) {
        if (std::abs(target - std::log2(static_cast<double>(m))) >= kEntropyTolerance) {
            throw Error("perplexity unattainable: all neighbours are equidistant");
        }
        cal.probabilities.assign(m, 1.0 / static_cast<double>(m));
        cal.entropy = std::log2(static_cast<double>(m));
        return cal;
    }

    // Bisection on log(beta * span); entropy decreases as beta grows.
    double lo = -50.0;
    double hi = 50.0;
    RowEntropy row{};
    double beta = 0.0;
    bool converged = false;
    for (int it = 0; it < kCalibrationIterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        beta = std::exp(mid) / span;
        row = evaluate(shifted, beta);
        const double diff = row.entropy_bits - target;
        if (std::abs(diff) < kEntropyTolerance) {
            converged = true;
            break;
        }
        if (diff > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (!converged) {
        throw Error("perplexity " + std::to_string(perplexity) +
                    " unattainable within the calibration budget");
    }
    cal.probabilities = std::move(row.p);
    cal.beta = beta;
    cal.entropy = row.entropy_bits;
    return cal;
}

double effective_perplexity(const TsneOptions& opts, Eigen::Index n)
{
    return std::min(opts.perplexity, static_cast<double>(n - 1) / 3.0);
}

Matrix joint_probabilities(const cluster::DistanceMatrix& d, double perplexity)
{
    const auto n = d.n();
    Matrix cond = Matrix::Zero(n, n);
    std::vector<double> row(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::size_t k = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) row[k++] = d(i, j);
        }
        const auto cal = perplexity_calibration(row, perplexity);
        k = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) cond(i, j) = cal.probabilities[k++];
        }
    }
    return (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
}

double kl_divergence(const Matrix& p, const Matrix& y)
{
    const auto n = y.rows();
    Matrix q(n, n);
    double z = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        q(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
            q(i, j) = q(j, i) = v;
            z += 2.0 * v;
        }
    }
    double kl = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && p(i, j) > 0.0) kl += p(i, j) * std::log(p(i, j) / (q(i, j) / z));
        }
    }
    return kl;
}

Embedding tsne(const cluster::DistanceMatrix& d, const TsneOptions& opts,
               const std::vector<std::uint64_t>* ids, JobControl* ctl, const TsneObserver& observer)
{
    const auto n = d.n();
    if (n < 4) throw Error("t-SNE needs at least 4 observations");
    if (ids && static_cast<Eigen::Index>(ids->size()) != n) throw Error("one id per observation required");
    const double perplexity = effective_perplexity(opts, n);
    if (!(perplexity >= 1.0)) throw Error("perplexity must be at least 1");

    // With ids, the optimization runs on rows sorted by id so every sum sees
    // the same operand order whatever order the caller supplied.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    if (ids) {
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return (*ids)[static_cast<std::size_t>(a)] < (*ids)[static_cast<std::size_t>(b)];
        });
    }
    Matrix sorted(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) sorted(i, j) = d(order[i], order[j]);
    }
    const Matrix p = joint_probabilities(cluster::DistanceMatrix(std::move(sorted), d.metric_id()), perplexity);
    auto restore = [&](const Matrix& ys) {
        Matrix out(n, 2);
        for (Eigen::Index i = 0; i < n; ++i) out.row(order[i]) = ys.row(i);
        return out;
    };

    Matrix y(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = static_cast<std::size_t>(order[i]);
        const std::uint64_t id = ids ? (*ids)[src] : static_cast<std::uint64_t>(src);
        std::mt19937_64 rng(splitmix(opts.seed ^ splitmix(id)));
        std::normal_distribution<double> normal(0.0, 1e-4);
        y(i, 0) = normal(rng);
        y(i, 1) = normal(rng);
    }

    Matrix update = Matrix::Zero(n, 2);
    Matrix gains = Matrix::Ones(n, 2);
    Matrix grad(n, 2);
    Matrix num(n, n);
    double momentum = opts.initial_momentum;
    for (int it = 0; it < opts.iterations; ++it) {
        check_cancel(ctl);
        if (it == opts.momentum_switch) momentum = opts.final_momentum;
        const double exaggeration = it < opts.exaggeration_iters ? opts.exaggeration : 1.0;

        double z = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            num(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double dx = y(i, 0) - y(j, 0);
                const double dy = y(i, 1) - y(j, 1);
                const double v = 1.0 / (1.0 + dx * dx + dy * dy);
                num(i, j) = num(j, i) = v;
                z += 2.0 * v;
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            double gx = 0.0;
            double gy = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                const double mult = (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
                gx += mult * (y(i, 0) - y(j, 0));
                gy += mult * (y(i, 1) - y(j, 1));
            }
            grad(i, 0) = 4.0 * gx;
            grad(i, 1) = 4.0 * gy;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index c = 0; c < 2; ++c) {
                const bool same = (grad(i, c) > 0.0) == (update(i, c) > 0.0);
                gains(i, c) = same ? gains(i, c) * 0.8 : gains(i, c) + 0.2;
                gains(i, c) = std::max(gains(i, c), 0.01);
                update(i, c) = momentum * update(i, c) - opts.learning_rate * gains(i, c) * grad(i, c);
                y(i, c) += update(i, c);
            }
        }
        const Eigen::RowVector2d mean = y.colwise().mean();
        y.rowwise() -= mean;
        if (observer) observer(it + 1, restore(y));
        report_progress(ctl, static_cast<double>(it + 1) / opts.iterations);
    }

    Embedding e;
    e.method_id = "tsne";
    e.coords = restore(y);
    e.seed = opts.seed;
    e.params = {{"perplexity", perplexity},
                {"iterations", static_cast<double>(opts.iterations)},
                {"learning_rate", opts.learning_rate},
                {"exaggeration", opts.exaggeration}};
    return e;
}

} // namespace twinspace::nldr
