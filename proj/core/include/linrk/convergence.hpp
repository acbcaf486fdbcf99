#pragma once

#include "linrk/types.hpp"

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace linrk {

struct ConvergencePoint {
    double h = 0.0;
    double error = 0.0;
    /// log2 ratio against the previous point; NaN for the first.
    double observed_order = std::numeric_limits<double>::quiet_NaN();
};

/// h_start, h_start/2, ..., count values.
[[nodiscard]] std::vector<double> halving_sequence(double h_start, int count);

/// Runs run(h) for every h and measures the max-norm error against reference.
[[nodiscard]] std::vector<ConvergencePoint> convergence_study(
    const std::function<Vector(double h)>& run, const Vector& reference,
    std::span<const double> steps);

/// Least-squares slope of log(error) against log(h).
[[nodiscard]] double fitted_slope(std::span<const ConvergencePoint> points);

}  // namespace linrk
