#pragma once

#include "linrk/problem.hpp"
#include "linrk/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>

namespace linrk {

namespace jacobian {

struct Analytic {};

/// Column j uses the increment eps_scale * max(|u_j|, 1).
struct ForwardDifference {
    double eps_scale = std::sqrt(std::numeric_limits<double>::epsilon());
};

/// Reuse one evaluation for max_age accepted steps; refresh earlier after
/// two consecutive rejections.
struct Frozen {
    int max_age = 5;
};

/// T_n is evaluated at the state of the previous accepted step.
struct TimeLagged {};

}  // namespace jacobian

using JacobianStrategy = std::variant<jacobian::Analytic, jacobian::ForwardDifference,
                                      jacobian::Frozen, jacobian::TimeLagged>;

/// Throws ArgumentError on eps_scale <= 0 or max_age < 1.
void check_strategy(const JacobianStrategy& s);

/// A Jacobian approximation plus the identity token factorizations are keyed on.
struct JacobianSample {
    Matrix matrix;
    std::uint64_t stamp = 0;
};

/// Fresh process-wide unique stamp.
[[nodiscard]] std::uint64_t next_jacobian_stamp() noexcept;

/// Column-wise forward differences of sys.rhs at (t, u). Throws
/// EvaluationError carrying the column index on non-finite f values.
[[nodiscard]] Matrix forward_difference_jacobian(const OdeSystem& sys, double t, const Vector& u,
                                                 double eps_scale);

/// Analytic Jacobian when sys has one, forward differences otherwise.
[[nodiscard]] Matrix exact_or_fd_jacobian(const OdeSystem& sys, double t, const Vector& u);

/// Per-run Jacobian cache implementing a JacobianStrategy.
///
/// evaluate() is called at the start of each step attempt, accept() after an
/// accepted step and reject() after a rejected one. Not thread-safe; each
/// integration run owns one.
class JacobianEvaluator {
public:
    JacobianEvaluator(const OdeSystem& sys, JacobianStrategy strategy);

    [[nodiscard]] const JacobianSample& evaluate(double t, const Vector& u);

    /// Jacobian for an intermediate point of a step (Richardson half steps):
    /// fresh for Analytic / ForwardDifference, the current sample otherwise.
    [[nodiscard]] JacobianSample intermediate(double t, const Vector& u);

    void accept(double t, const Vector& u);
    void reject();

    [[nodiscard]] std::size_t refreshes() const noexcept { return refreshes_; }
    [[nodiscard]] const JacobianStrategy& strategy() const noexcept { return strategy_; }

private:
    Matrix compute(double t, const Vector& u) const;
    void refresh(double t, const Vector& u);

    const OdeSystem* sys_;
    JacobianStrategy strategy_;
    std::optional<JacobianSample> current_;
    bool stale_ = true;
    int age_ = 0;
    int consecutive_rejections_ = 0;
    std::size_t refreshes_ = 0;
    /// Point the current sample was evaluated at.
    std::optional<std::pair<double, Vector>> lagged_;
    std::optional<std::pair<double, Vector>> last_accepted_;
    std::optional<std::pair<double, Vector>> previous_;
};

/// Single evaluation following a strategy; see JacobianEvaluator for caches.
[[nodiscard]] JacobianSample eval_jacobian(const OdeSystem& sys, double t, const Vector& u,
                                           JacobianEvaluator& cache);

}  // namespace linrk
