#pragma once

#include "linrk/jacobian.hpp"
#include "linrk/problem.hpp"

#include <vector>

namespace linrk {

/// Aitken-Neville table over linearly implicit Euler passes.
///
/// Row j uses n_j = (j+1)*base_steps substeps on [t0, t_end] (harmonic
/// sequence); entry (j, k), k <= j, eliminates k error terms and has order
/// k+1 in the macro step (t_end - t0)/base_steps.
struct ExtrapolationTable {
    std::vector<int> substeps;
    std::vector<std::vector<Vector>> entries;

    [[nodiscard]] const Vector& best() const { return entries.back().back(); }
};

/// Throws ArgumentError unless base_steps >= 1 and 1 <= columns <= 4, and
/// IntegrationFailure if a pass fails.
[[nodiscard]] ExtrapolationTable extrapolate_lie(const OdeSystem& sys, const Vector& u0, double t0,
                                                 double t_end, int base_steps, int columns,
                                                 const JacobianStrategy& strategy = jacobian::Analytic{});

/// Fixed-step linearly implicit Euler on [t0, t_end] with n steps.
[[nodiscard]] Vector lie_fixed_steps(const OdeSystem& sys, const Vector& u0, double t0,
                                     double t_end, int n,
                                     const JacobianStrategy& strategy = jacobian::Analytic{});

}  // namespace linrk
