#pragma once

#include <linrk/linrk.hpp>

#include <cmath>
#include <random>
#include <vector>

namespace linrk::testing {

/// Final state of a fixed-step one-step run with step h.
inline Vector fixed_run(const OdeSystem& sys, const RowTableau& t, double h,
                        StepMode mode = StepMode::transformed,
                        JacobianStrategy jac = jacobian::Analytic{}) {
    IntegrationControl ctrl;
    ctrl.fixed_step = true;
    ctrl.h0 = h;
    ctrl.mode = mode;
    ctrl.jacobian = jac;
    return integrate(sys, t, ctrl).final_state();
}

inline Vector twostep_run(const OdeSystem& sys, const std::variant<TwoStepWTableau, PeerTableau>& m,
                          double h) {
    TwoStepControl ctrl;
    ctrl.n_steps = static_cast<int>(std::lround((sys.t_end - sys.t0) / h));
    return integrate_twostep(sys, m, ctrl).final_state();
}

/// h = 2^-3 ... 2^-8
inline std::vector<double> smooth_steps() { return halving_sequence(0.125, 6); }

inline double slope_of(const std::function<Vector(double)>& run, const OdeSystem& sys,
                       const std::vector<double>& hs = smooth_steps()) {
    const auto pts = convergence_study(run, sys.exact(sys.t_end), hs);
    return fitted_slope(pts);
}

inline double rel_diff(const Vector& a, const Vector& b) {
    const double scale = std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>());
    const double d = (a - b).lpNorm<Eigen::Infinity>();
    return scale > 0.0 ? d / scale : d;
}

/// Valid ROW tableau with s stages and diagonal entries in [0.2, 1].
inline RowTableau random_tableau(std::mt19937& rng, Index s) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> diag(0.2, 1.0);
    RowTableau t;
    t.name = "random";
    t.alpha = Matrix::Zero(s, s);
    t.gamma = Matrix::Zero(s, s);
    for (Index i = 0; i < s; ++i) {
        for (Index j = 0; j < i; ++j) {
            t.alpha(i, j) = coef(rng);
            t.gamma(i, j) = coef(rng);
        }
        t.gamma(i, i) = diag(rng);
    }
    t.b = Vector(s);
    t.b_hat = Vector(s);
    for (Index i = 0; i < s; ++i) {
        t.b(i) = coef(rng);
        (*t.b_hat)(i) = coef(rng);
    }
    t.order = 1;
    t.embedded_order = 1;
    return t;
}

}  // namespace linrk::testing
