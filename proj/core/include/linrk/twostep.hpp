#pragma once

#include "linrk/jacobian.hpp"
#include "linrk/linsolve.hpp"
#include "linrk/onestep.hpp"
#include "linrk/problem.hpp"
#include "linrk/tableau.hpp"

#include <variant>
#include <vector>

namespace linrk {

/// Stage values of the previous step plus the current state.
struct TwoStepState {
    std::vector<Vector> prev_stage_values;
    Vector prev_state;
    double h_prev = 0.0;
};

struct TwoStepResult {
    TwoStepState next;
    Vector u_next;
    std::size_t factorizations_used = 0;
};

/// Throws StepError on a singular stage matrix and ArgumentError on a
/// dimension mismatch of st.
[[nodiscard]] TwoStepResult tsw_step(const OdeSystem& sys, const TwoStepWTableau& t,
                                     const TwoStepState& st, double tn, double h,
                                     const JacobianSample& jac, StageSolver& solver);

/// Stage values are solution approximations; u_next is the last stage.
[[nodiscard]] TwoStepResult peer_step(const OdeSystem& sys, const PeerTableau& t,
                                      const TwoStepState& st, double tn, double h,
                                      const JacobianSample& jac, StageSolver& solver);

/// Constant-step transfer matrix on y' = lambda y with T = lambda, z = h lambda:
/// stacked stages satisfy U_n = M(z) U_{n-1}, M(z) = ((1 - gamma z) I - z G)^-1 B.
/// Throws ArgumentError at the pole 1 - gamma z = 0.
[[nodiscard]] ComplexMatrix peer_transfer_matrix(const PeerTableau& t, Complex z);

[[nodiscard]] double spectral_radius(const ComplexMatrix& m);

struct TwoStepControl {
    /// Constant step; default (t_end - t0)/n_steps.
    std::optional<double> h;
    int n_steps = 100;
    JacobianStrategy jacobian = jacobian::Analytic{};
    /// Peer startup: linearly implicit Euler substeps per macro step.
    int startup_substeps = 100;
};

/// Constant-step two-step integration of n_steps steps of size h from t0.
///
/// The first step is a startup: the one-step reduction for two-step W
/// methods, a fine linearly implicit Euler run sampled at the nodes for peer
/// methods. Returns the states at the macro step points.
[[nodiscard]] Trajectory integrate_twostep(const OdeSystem& sys,
                                           const std::variant<TwoStepWTableau, PeerTableau>& method,
                                           const TwoStepControl& ctrl);

}  // namespace linrk
