#pragma once

#include "linrk/jacobian.hpp"
#include "linrk/linsolve.hpp"
#include "linrk/problem.hpp"
#include "linrk/tableau.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace linrk {

/// direct: the K-form with (I - h gamma_ii T); transformed: the S-form with
/// (I/(h gamma_ii) - T), which avoids products with T.
enum class StepMode { direct, transformed };

enum class ErrorMode { embedded, richardson };

struct StepOutcome {
    Vector u_next;
    std::optional<Vector> u_embedded;
    /// K_i (direct) or S_i (transformed).
    std::vector<Vector> stages;
    std::size_t factorizations_used = 0;
    std::size_t f_evals = 0;
    /// Classical order of the method that produced the step.
    int order = 1;
};

/// One step of an autonomous ROW/W method with Jacobian approximation
/// jac.matrix. Factorizations come from (and are cached in) solver.
///
/// Throws StepError on a singular stage matrix or a non-finite result.
[[nodiscard]] StepOutcome row_step(const OdeSystem& sys, const RowTableau& t, const Vector& u,
                                   double tn, double h, const JacobianSample& jac,
                                   StageSolver& solver);
[[nodiscard]] StepOutcome row_step(const OdeSystem& sys, const TransformedTableau& t,
                                   const Vector& u, double tn, double h,
                                   const JacobianSample& jac, StageSolver& solver);

/// Convenience overload with a private solver; mode picks the form.
[[nodiscard]] StepOutcome row_step(const OdeSystem& sys, const RowTableau& t, const Vector& u,
                                   double tn, double h, const Matrix& T,
                                   StepMode mode = StepMode::transformed);

/// Direct-form step for a non-autonomous system without the appended clock:
/// stage times tn + alpha_i h and the extra term gamma_i h^2 df/dt.
/// Exists for cross-checking autonomize().
[[nodiscard]] StepOutcome row_step_nonautonomous(const OdeSystem& sys, const RowTableau& t,
                                                 const Vector& u, double tn, double h,
                                                 const Matrix& T, const Vector& f_t,
                                                 StageSolver& solver,
                                                 std::uint64_t stamp = 0);

/// Weighted RMS norm with weights atol + rtol*|reference_k|.
[[nodiscard]] double weighted_rms(const Vector& diff, const Vector& reference, double atol,
                                  double rtol);

/// Result of two consecutive half steps, for Richardson estimates.
struct HalfSteps {
    StepOutcome first;
    StepOutcome second;
};

/// Embedded: wrms(u_next - u_embedded). Richardson: wrms(second.u_next -
/// out.u_next) / (2^p - 1) with p = out.order, which estimates the error of
/// the two-half-step result. Throws ArgumentError if the needed data is
/// missing or atol <= 0 or rtol < 0.
[[nodiscard]] double estimate_error(const StepOutcome& out, ErrorMode mode,
                                    const HalfSteps* aux, double atol, double rtol);

struct StepProposal {
    double h_new = 0.0;
    bool accept = false;
};

/// h_new = h * clamp(0.9 * err^(-1/(p_hat+1)), 0.2, 5); accept iff err <= 1.
[[nodiscard]] StepProposal propose_step(double err, double h, int p_hat);

struct IntegrationControl {
    double atol = 1e-6;
    double rtol = 1e-6;
    /// Initial (adaptive) or constant (fixed) step; default (t_end - t0)/100.
    std::optional<double> h0;
    double h_min = 1e-14;
    std::size_t max_steps = 1'000'000;
    /// Default: embedded when the tableau has b_hat, Richardson otherwise.
    std::optional<ErrorMode> error_mode;
    JacobianStrategy jacobian = jacobian::Analytic{};
    StepMode mode = StepMode::transformed;
    /// Disable error control and step with h0 (last step truncated).
    bool fixed_step = false;
    /// Integrate non-autonomous systems via autonomize(); false selects the
    /// direct non-autonomous stage formula.
    bool autonomize = true;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t jacobian_refreshes = 0;
    std::size_t factorizations = 0;
    std::size_t f_evals = 0;
    /// Factorizations spent on each accepted step (attempt that was kept).
    std::vector<std::size_t> step_factorizations;

    [[nodiscard]] const Vector& final_state() const { return states.back(); }
};

/// Adaptive (or fixed-step) integration over [sys.t0, sys.t_end].
///
/// Throws IntegrationFailure when h drops below h_min, max_steps is
/// exceeded, or stage matrices stay singular.
[[nodiscard]] Trajectory integrate(const OdeSystem& sys, const RowTableau& method,
                                   const IntegrationControl& ctrl = {});

}  // namespace linrk
