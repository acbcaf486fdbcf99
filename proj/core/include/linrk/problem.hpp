#pragma once

#include "linrk/types.hpp"

#include <functional>
#include <string>

namespace linrk {

using RhsFn = std::function<Vector(double t, const Vector& u)>;
using JacobianFn = std::function<Matrix(double t, const Vector& u)>;
using TimeDerivativeFn = std::function<Vector(double t, const Vector& u)>;
using ExactFn = std::function<Vector(double t)>;

/// u' = f(t, u) on [t0, t_end], u(t0) = u0.
///
/// Evaluation maps must be pure; the same system may be integrated by
/// concurrent runs.
struct OdeSystem {
    std::string name;
    Index dim = 0;
    RhsFn rhs;
    /// Analytic df/du, may be empty.
    JacobianFn jacobian;
    /// Analytic df/dt, may be empty. Only used for non-autonomous systems.
    TimeDerivativeFn time_derivative;
    bool autonomous = true;
    double t0 = 0.0;
    double t_end = 1.0;
    Vector u0;
    /// Reference solution, may be empty.
    ExactFn exact;

    /// f(t, u) with a dimension check on input and output.
    [[nodiscard]] Vector eval(double t, const Vector& u) const;
    [[nodiscard]] bool has_jacobian() const noexcept { return static_cast<bool>(jacobian); }
    [[nodiscard]] bool has_exact() const noexcept { return static_cast<bool>(exact); }
};

/// y' = lambda*y, y(0) = 1 on [0, 1].
[[nodiscard]] OdeSystem make_dahlquist(double lambda);

/// Complex lambda embedded as the real 2x2 system for (Re y, Im y).
[[nodiscard]] OdeSystem make_dahlquist(Complex lambda);

/// 1-D heat equation u_t = d u_xx on (0,1), homogeneous Dirichlet, second
/// order finite differences on n_interior points: U' = A U with
/// A = (d/h_x^2) tridiag(1,-2,1). U(0) samples sin(pi x), which is an
/// eigenvector of A, so the semi-discrete solution is known exactly.
/// Time span [0, 1].
[[nodiscard]] OdeSystem make_heat1d(Index n_interior, double d);

/// The matrix A of make_heat1d.
[[nodiscard]] Matrix heat1d_matrix(Index n_interior, double d);

/// Prothero-Robinson problem u' = lambda (u - sin t) + cos t, u(0) = 0, with
/// exact solution sin t on [0, 1]. Non-autonomous.
[[nodiscard]] OdeSystem make_order_reduction_problem(double lambda_stiff);

/// Appends the clock t' = 1 as the last component. The Jacobian is bordered:
/// last column df/dt and a zero last row. If the input has an analytic
/// Jacobian but no df/dt, the last column is taken by forward differences.
[[nodiscard]] OdeSystem autonomize(const OdeSystem& sys);

}  // namespace linrk
