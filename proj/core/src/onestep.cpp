#include "linrk/onestep.hpp"

#include "linrk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace linrk {

namespace {

void check_step_args(const OdeSystem& sys, Index s, const Vector& u, double h, const Matrix& T) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("row_step: h must be positive");
    if (s < 1) throw ArgumentError("row_step: tableau has no stages");
    if (u.size() != sys.dim) throw ArgumentError("row_step: state dimension mismatch");
    if (T.rows() != sys.dim || T.cols() != sys.dim) {
        throw ArgumentError("row_step: T must be square of dimension dim");
    }
}

void check_finite_result(const StepOutcome& out) {
    if (!out.u_next.allFinite()) throw StepError("row_step: non-finite state");
}

Vector solve_stage(StageSolver& solver, const Matrix& T, std::uint64_t stamp, double h_gamma,
                   StageForm form, const Vector& rhs) {
    try {
        return solver.solve(T, stamp, h_gamma, form, rhs);
    } catch (const SingularMatrixError& e) {
        throw StepError(std::string("singular stage matrix: ") + e.what());
    }
}

Vector fd_time_derivative(const OdeSystem& sys, double t, const Vector& u) {
    const double dt = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(std::abs(t), 1.0);
    return (sys.eval(t + dt, u) - sys.eval(t, u)) / dt;
}

}  // namespace

StepOutcome row_step(const OdeSystem& sys, const RowTableau& t, const Vector& u, double tn,
                     double h, const JacobianSample& jac, StageSolver& solver) {
    const Index s = t.stages();
    const Matrix& T = jac.matrix;
    check_step_args(sys, s, u, h, T);
    const std::size_t before = solver.factorizations();

    StepOutcome out;
    out.order = t.order;
    out.stages.reserve(static_cast<std::size_t>(s));
    for (Index i = 0; i < s; ++i) {
        Vector ui = u;
        Vector gsum = Vector::Zero(sys.dim);
        double ci = 0.0;
        for (Index j = 0; j < i; ++j) {
            const auto& kj = out.stages[static_cast<std::size_t>(j)];
            if (t.alpha(i, j) != 0.0) ui += t.alpha(i, j) * kj;
            if (t.gamma(i, j) != 0.0) gsum += t.gamma(i, j) * kj;
            ci += t.alpha(i, j);
        }
        Vector rhs = h * sys.eval(tn + ci * h, ui);
        ++out.f_evals;
        if (i > 0) rhs += h * (T * gsum);
        out.stages.push_back(
            solve_stage(solver, T, jac.stamp, h * t.gamma(i, i), StageForm::scaled_identity, rhs));
    }

    out.u_next = u;
    for (Index i = 0; i < s; ++i) out.u_next += t.b(i) * out.stages[static_cast<std::size_t>(i)];
    if (t.b_hat) {
        Vector e = u;
        for (Index i = 0; i < s; ++i) e += (*t.b_hat)(i) * out.stages[static_cast<std::size_t>(i)];
        out.u_embedded = std::move(e);
    }
    out.factorizations_used = solver.factorizations() - before;
    check_finite_result(out);
    return out;
}

StepOutcome row_step(const OdeSystem& sys, const TransformedTableau& t, const Vector& u,
                     double tn, double h, const JacobianSample& jac, StageSolver& solver) {
    const Index s = t.stages();
    const Matrix& T = jac.matrix;
    check_step_args(sys, s, u, h, T);
    const std::size_t before = solver.factorizations();

    StepOutcome out;
    out.order = t.order;
    out.stages.reserve(static_cast<std::size_t>(s));
    for (Index i = 0; i < s; ++i) {
        Vector ui = u;
        Vector rhs_c = Vector::Zero(sys.dim);
        double ci = 0.0;
        for (Index j = 0; j < i; ++j) {
            const auto& sj = out.stages[static_cast<std::size_t>(j)];
            if (t.a(i, j) != 0.0) ui += t.a(i, j) * sj;
            if (t.c(i, j) != 0.0) rhs_c += (t.c(i, j) / h) * sj;
            ci += t.a(i, j);
        }
        // Stage abscissa is only meaningful for autonomous systems here.
        Vector rhs = sys.eval(tn + ci * h, ui) + rhs_c;
        ++out.f_evals;
        out.stages.push_back(
            solve_stage(solver, T, jac.stamp, h * t.gamma_diag(i), StageForm::shifted_jacobian, rhs));
    }

    out.u_next = u;
    for (Index i = 0; i < s; ++i) out.u_next += t.m(i) * out.stages[static_cast<std::size_t>(i)];
    if (t.m_hat) {
        Vector e = u;
        for (Index i = 0; i < s; ++i) e += (*t.m_hat)(i) * out.stages[static_cast<std::size_t>(i)];
        out.u_embedded = std::move(e);
    }
    out.factorizations_used = solver.factorizations() - before;
    check_finite_result(out);
    return out;
}

StepOutcome row_step(const OdeSystem& sys, const RowTableau& t, const Vector& u, double tn,
                     double h, const Matrix& T, StepMode mode) {
    StageSolver solver;
    const JacobianSample jac{T, next_jacobian_stamp()};
    if (mode == StepMode::direct) return row_step(sys, t, u, tn, h, jac, solver);
    return row_step(sys, transform(t), u, tn, h, jac, solver);
}

StepOutcome row_step_nonautonomous(const OdeSystem& sys, const RowTableau& t, const Vector& u,
                                   double tn, double h, const Matrix& T, const Vector& f_t,
                                   StageSolver& solver, std::uint64_t stamp) {
    const Index s = t.stages();
    check_step_args(sys, s, u, h, T);
    if (f_t.size() != sys.dim) throw ArgumentError("row_step_nonautonomous: df/dt has wrong length");
    const std::size_t before = solver.factorizations();
    const Vector nodes = stage_nodes(t);
    const Vector gsums = stage_gamma_sums(t);

    StepOutcome out;
    out.order = t.order;
    for (Index i = 0; i < s; ++i) {
        Vector ui = u;
        Vector gsum = Vector::Zero(sys.dim);
        for (Index j = 0; j < i; ++j) {
            const auto& kj = out.stages[static_cast<std::size_t>(j)];
            ui += t.alpha(i, j) * kj;
            gsum += t.gamma(i, j) * kj;
        }
        Vector rhs = h * sys.eval(tn + nodes(i) * h, ui) + (gsums(i) * h * h) * f_t;
        ++out.f_evals;
        if (i > 0) rhs += h * (T * gsum);
        out.stages.push_back(
            solve_stage(solver, T, stamp, h * t.gamma(i, i), StageForm::scaled_identity, rhs));
    }
    out.u_next = u;
    for (Index i = 0; i < s; ++i) out.u_next += t.b(i) * out.stages[static_cast<std::size_t>(i)];
    if (t.b_hat) {
        Vector e = u;
        for (Index i = 0; i < s; ++i) e += (*t.b_hat)(i) * out.stages[static_cast<std::size_t>(i)];
        out.u_embedded = std::move(e);
    }
    out.factorizations_used = solver.factorizations() - before;
    check_finite_result(out);
    return out;
}

double weighted_rms(const Vector& diff, const Vector& reference, double atol, double rtol) {
    if (diff.size() != reference.size()) throw ArgumentError("weighted_rms: length mismatch");
    if (diff.size() == 0) return 0.0;
    const Vector w = (atol + rtol * reference.array().abs()).matrix();
    return std::sqrt((diff.array() / w.array()).square().mean());
}

double estimate_error(const StepOutcome& out, ErrorMode mode, const HalfSteps* aux, double atol,
                      double rtol) {
    if (!(atol > 0.0)) throw ArgumentError("estimate_error: atol must be positive");
    if (!(rtol >= 0.0)) throw ArgumentError("estimate_error: rtol must be non-negative");
    if (mode == ErrorMode::embedded) {
        if (!out.u_embedded) throw ArgumentError("estimate_error: method has no embedded weights");
        return weighted_rms(out.u_next - *out.u_embedded, out.u_next, atol, rtol);
    }
    if (aux == nullptr) throw ArgumentError("estimate_error: Richardson needs the half steps");
    const Vector& fine = aux->second.u_next;
    const double scale = std::pow(2.0, out.order) - 1.0;
    return weighted_rms(fine - out.u_next, fine, atol, rtol) / scale;
}

StepProposal propose_step(double err, double h, int p_hat) {
    constexpr double safety = 0.9;
    constexpr double fmin = 0.2;
    constexpr double fmax = 5.0;
    if (!std::isfinite(err)) return {h * fmin, false};
    const double factor =
        err <= 0.0 ? fmax
                   : std::clamp(safety * std::pow(err, -1.0 / (p_hat + 1.0)), fmin, fmax);
    return {h * factor, err <= 1.0};
}

namespace {

struct Stepper {
    const OdeSystem& work;
    const RowTableau& method;
    std::optional<TransformedTableau> transformed;
    bool nonautonomous_direct = false;
    StageSolver solver;

    StepOutcome step(double t, const Vector& u, double h, const JacobianSample& jac) {
        if (nonautonomous_direct) {
            const Vector ft = work.time_derivative ? work.time_derivative(t, u)
                                                   : fd_time_derivative(work, t, u);
            return row_step_nonautonomous(work, method, u, t, h, jac.matrix, ft, solver, jac.stamp);
        }
        if (transformed) return row_step(work, *transformed, u, t, h, jac, solver);
        return row_step(work, method, u, t, h, jac, solver);
    }
};

}  // namespace

Trajectory integrate(const OdeSystem& sys, const RowTableau& method, const IntegrationControl& ctrl) {
    if (auto report = validate(method); !report.valid()) {
        throw StructuralError("integrate: invalid tableau " + method.name + ": " +
                              report.issues.front());
    }
    if (!(sys.t_end > sys.t0)) throw ArgumentError("integrate: t_end must exceed t0");
    if (!(ctrl.atol > 0.0)) throw ArgumentError("integrate: atol must be positive");
    if (!(ctrl.rtol >= 0.0)) throw ArgumentError("integrate: rtol must be non-negative");
    if (ctrl.h0 && !(*ctrl.h0 > 0.0)) throw ArgumentError("integrate: h0 must be positive");
    if (sys.u0.size() != sys.dim) throw ArgumentError("integrate: u0 has the wrong dimension");

    const ErrorMode emode =
        ctrl.error_mode.value_or(method.has_embedded() ? ErrorMode::embedded : ErrorMode::richardson);
    if (!ctrl.fixed_step && emode == ErrorMode::embedded && !method.has_embedded()) {
        throw ArgumentError("integrate: " + method.name + " has no embedded weights");
    }
    const int p_hat = emode == ErrorMode::embedded ? method.embedded_order.value_or(method.order - 1)
                                                   : method.order;

    const bool clock = !sys.autonomous && ctrl.autonomize;
    const OdeSystem work = clock ? autonomize(sys) : sys;
    const Index n = sys.dim;

    Stepper stepper{work, method, std::nullopt, !sys.autonomous && !ctrl.autonomize, StageSolver{}};
    if (ctrl.mode == StepMode::transformed && !stepper.nonautonomous_direct) {
        stepper.transformed = transform(method);
    }
    JacobianEvaluator evaluator(work, ctrl.jacobian);

    Trajectory traj;
    double t = sys.t0;
    Vector u = work.u0;
    auto record = [&](double time, const Vector& state) {
        traj.times.push_back(time);
        traj.states.push_back(state.head(n));
    };
    record(t, u);

    const double span = sys.t_end - sys.t0;
    double h = ctrl.h0.value_or(span / 100.0);

    auto failure = [&](const std::string& why) {
        std::ostringstream os;
        os << "integrate: " << why << " at t = " << t;
        return IntegrationFailure(os.str(), t, u.head(n));
    };

    auto finish = [&] {
        traj.jacobian_refreshes = evaluator.refreshes();
        traj.factorizations = stepper.solver.factorizations();
        return traj;
    };

    if (ctrl.fixed_step) {
        const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / h - 1e-9)));
        if (steps > ctrl.max_steps) throw failure("fixed step count exceeds max_steps");
        for (std::size_t k = 0; k < steps; ++k) {
            const double t_next =
                k + 1 == steps ? sys.t_end : sys.t0 + static_cast<double>(k + 1) * h;
            // Keep h bitwise when the last step is only truncated by roundoff.
            const double hk = std::abs(t_next - t - h) <= 1e-9 * h ? h : t_next - t;
            const std::size_t before = stepper.solver.factorizations();
            StepOutcome out;
            try {
                const JacobianSample& jac = evaluator.evaluate(t, u);
                out = stepper.step(t, u, hk, jac);
            } catch (const StepError& e) {
                throw failure(e.what());
            } catch (const EvaluationError& e) {
                throw failure(e.what());
            }
            traj.f_evals += out.f_evals;
            u = std::move(out.u_next);
            t = t_next;
            evaluator.accept(t, u);
            ++traj.accepted;
            traj.step_factorizations.push_back(stepper.solver.factorizations() - before);
            record(t, u);
        }
        return finish();
    }

    while (t < sys.t_end) {
        if (traj.accepted + traj.rejected >= ctrl.max_steps) throw failure("max_steps exceeded");
        bool last = false;
        if (t + h * (1.0 + 1e-8) >= sys.t_end) {
            h = sys.t_end - t;
            last = true;
        }
        const std::size_t before = stepper.solver.factorizations();
        double err = std::numeric_limits<double>::infinity();
        Vector candidate;
        try {
            const JacobianSample& jac = evaluator.evaluate(t, u);
            StepOutcome out = stepper.step(t, u, h, jac);
            traj.f_evals += out.f_evals;
            if (emode == ErrorMode::embedded) {
                err = estimate_error(out, emode, nullptr, ctrl.atol, ctrl.rtol);
                candidate = std::move(out.u_next);
            } else {
                const JacobianSample jac0 = jac;
                HalfSteps halves;
                halves.first = stepper.step(t, u, h / 2.0, jac0);
                const JacobianSample mid = evaluator.intermediate(t + h / 2.0, halves.first.u_next);
                halves.second = stepper.step(t + h / 2.0, halves.first.u_next, h / 2.0, mid);
                traj.f_evals += halves.first.f_evals + halves.second.f_evals;
                err = estimate_error(out, emode, &halves, ctrl.atol, ctrl.rtol);
                candidate = std::move(halves.second.u_next);
            }
        } catch (const StepError&) {
            err = std::numeric_limits<double>::infinity();
        } catch (const EvaluationError&) {
            err = std::numeric_limits<double>::infinity();
        }

        const StepProposal prop = propose_step(err, h, p_hat);
        if (prop.accept) {
            t = last ? sys.t_end : t + h;
            u = std::move(candidate);
            evaluator.accept(t, u);
            ++traj.accepted;
            traj.step_factorizations.push_back(stepper.solver.factorizations() - before);
            record(t, u);
        } else {
            ++traj.rejected;
            evaluator.reject();
        }
        h = prop.h_new;
        if (t < sys.t_end && h < ctrl.h_min) throw failure("step size below h_min");
    }
    return finish();
}

}  // namespace linrk
