#pragma once

#include <Eigen/Dense>

#include <atomic>

namespace twinspace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Shared between a long-running computation and whoever started it.
struct JobControl {
    std::atomic<bool> cancel{false};
    std::atomic<double> progress{0.0};
};

// Throws Cancelled when the job was asked to stop.
void check_cancel(const JobControl* ctl);
void report_progress(JobControl* ctl, double fraction);

} // namespace twinspace
