#include "linrk/jacobian.hpp"

#include "linrk/errors.hpp"

#include <algorithm>
#include <atomic>
#include <string>

namespace linrk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool same_point(const std::optional<std::pair<double, Vector>>& p, double t, const Vector& u) {
    return p && p->first == t && p->second.size() == u.size() && p->second == u;
}

}  // namespace

void check_strategy(const JacobianStrategy& s) {
    std::visit(overloaded{
                   [](const jacobian::ForwardDifference& fd) {
                       if (!(fd.eps_scale > 0.0)) {
                           throw ArgumentError("forward difference eps_scale must be positive");
                       }
                   },
                   [](const jacobian::Frozen& f) {
                       if (f.max_age < 1) throw ArgumentError("frozen max_age must be at least 1");
                   },
                   [](const auto&) {},
               },
               s);
}

std::uint64_t next_jacobian_stamp() noexcept {
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}

Matrix forward_difference_jacobian(const OdeSystem& sys, double t, const Vector& u,
                                   double eps_scale) {
    const Vector f0 = sys.eval(t, u);
    if (!f0.allFinite()) throw EvaluationError(sys.name + ": f is not finite at the base point", -1);
    Matrix j(sys.dim, sys.dim);
    Vector up = u;
    for (Index c = 0; c < sys.dim; ++c) {
        const double orig = up(c);
        up(c) = orig + eps_scale * std::max(std::abs(orig), 1.0);
        const double du = up(c) - orig;
        const Vector fc = sys.eval(t, up);
        if (!fc.allFinite()) {
            throw EvaluationError(sys.name + ": f is not finite when perturbing column " +
                                      std::to_string(c),
                                  c);
        }
        j.col(c) = (fc - f0) / du;
        up(c) = orig;
    }
    return j;
}

Matrix exact_or_fd_jacobian(const OdeSystem& sys, double t, const Vector& u) {
    if (sys.has_jacobian()) return sys.jacobian(t, u);
    return forward_difference_jacobian(sys, t, u, jacobian::ForwardDifference{}.eps_scale);
}

JacobianEvaluator::JacobianEvaluator(const OdeSystem& sys, JacobianStrategy strategy)
    : sys_(&sys), strategy_(std::move(strategy)) {
    check_strategy(strategy_);
    const bool needs_analytic = std::holds_alternative<jacobian::Analytic>(strategy_);
    if (needs_analytic && !sys.has_jacobian()) {
        throw ArgumentError(sys.name + ": analytic Jacobian requested but none is available");
    }
}

Matrix JacobianEvaluator::compute(double t, const Vector& u) const {
    if (const auto* fd = std::get_if<jacobian::ForwardDifference>(&strategy_)) {
        return forward_difference_jacobian(*sys_, t, u, fd->eps_scale);
    }
    return exact_or_fd_jacobian(*sys_, t, u);
}

void JacobianEvaluator::refresh(double t, const Vector& u) {
    Matrix m = compute(t, u);
    if (m.rows() != sys_->dim || m.cols() != sys_->dim) {
        throw EvaluationError(sys_->name + ": Jacobian has the wrong shape", -1);
    }
    if (!m.allFinite()) throw EvaluationError(sys_->name + ": Jacobian is not finite", -1);
    current_ = JacobianSample{std::move(m), next_jacobian_stamp()};
    lagged_ = std::make_pair(t, u);
    stale_ = false;
    age_ = 0;
    ++refreshes_;
}

const JacobianSample& JacobianEvaluator::evaluate(double t, const Vector& u) {
    if (!last_accepted_) last_accepted_ = std::make_pair(t, u);
    std::visit(overloaded{
                   [&](const jacobian::Frozen& f) {
                       if (!current_ || stale_ || age_ >= f.max_age) refresh(t, u);
                   },
                   [&](const jacobian::TimeLagged&) {
                       // previous_ holds the state before the last accepted one
                       const auto& src = previous_ ? *previous_ : *last_accepted_;
                       if (!current_ || !same_point(lagged_, src.first, src.second)) {
                           refresh(src.first, src.second);
                       }
                   },
                   [&](const auto&) {
                       if (!current_ || !same_point(lagged_, t, u)) refresh(t, u);
                   },
               },
               strategy_);
    return *current_;
}

JacobianSample JacobianEvaluator::intermediate(double t, const Vector& u) {
    const bool fresh = std::holds_alternative<jacobian::Analytic>(strategy_) ||
                       std::holds_alternative<jacobian::ForwardDifference>(strategy_);
    if (!fresh && current_) return *current_;
    if (!fresh) return evaluate(t, u);
    ++refreshes_;
    return JacobianSample{compute(t, u), next_jacobian_stamp()};
}

void JacobianEvaluator::accept(double t, const Vector& u) {
    previous_ = last_accepted_;
    last_accepted_ = std::make_pair(t, u);
    ++age_;
    consecutive_rejections_ = 0;
}

void JacobianEvaluator::reject() {
    if (++consecutive_rejections_ >= 2 && std::holds_alternative<jacobian::Frozen>(strategy_)) {
        stale_ = true;
        consecutive_rejections_ = 0;
    }
}

JacobianSample eval_jacobian(const OdeSystem&, double t, const Vector& u, JacobianEvaluator& cache) {
    return cache.evaluate(t, u);
}

}  // namespace linrk
