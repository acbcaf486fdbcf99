#include "linrk/convergence.hpp"

#include "linrk/errors.hpp"

#include <cmath>

namespace linrk {

std::vector<double> halving_sequence(double h_start, int count) {
    if (!(h_start > 0.0)) throw ArgumentError("halving_sequence: h_start must be positive");
    if (count < 1) throw ArgumentError("halving_sequence: count must be at least 1");
    std::vector<double> hs;
    hs.reserve(static_cast<std::size_t>(count));
    double h = h_start;
    for (int k = 0; k < count; ++k, h /= 2.0) hs.push_back(h);
    return hs;
}

std::vector<ConvergencePoint> convergence_study(const std::function<Vector(double h)>& run,
                                                const Vector& reference,
                                                std::span<const double> steps) {
    std::vector<ConvergencePoint> out;
    out.reserve(steps.size());
    for (double h : steps) {
        const Vector u = run(h);
        if (u.size() != reference.size()) {
            throw ArgumentError("convergence_study: result and reference lengths differ");
        }
        ConvergencePoint p;
        p.h = h;
        p.error = (u - reference).lpNorm<Eigen::Infinity>();
        if (!out.empty()) {
            const auto& q = out.back();
            p.observed_order = std::log(q.error / p.error) / std::log(q.h / h);
        }
        out.push_back(p);
    }
    return out;
}

double fitted_slope(std::span<const ConvergencePoint> points) {
    if (points.size() < 2) throw ArgumentError("fitted_slope: need at least two points");
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    const auto n = static_cast<double>(points.size());
    for (const auto& p : points) {
        const double x = std::log(p.h);
        const double y = std::log(p.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace linrk
