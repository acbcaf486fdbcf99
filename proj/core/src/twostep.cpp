#include "linrk/twostep.hpp"

#include "linrk/errors.hpp"
#include "linrk/extrapolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace linrk {

namespace {

void check_state(const OdeSystem& sys, const TwoStepState& st, Index s, double h, const Matrix& T,
                 const char* who) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError(std::string(who) + ": h must be positive");
    if (st.prev_stage_values.size() != static_cast<std::size_t>(s)) {
        throw ArgumentError(std::string(who) + ": expected " + std::to_string(s) +
                            " previous stage values, got " +
                            std::to_string(st.prev_stage_values.size()));
    }
    for (const auto& v : st.prev_stage_values) {
        if (v.size() != sys.dim) throw ArgumentError(std::string(who) + ": stage dimension mismatch");
    }
    if (st.prev_state.size() != sys.dim) {
        throw ArgumentError(std::string(who) + ": state dimension mismatch");
    }
    if (T.rows() != sys.dim || T.cols() != sys.dim) {
        throw ArgumentError(std::string(who) + ": T must be square of dimension dim");
    }
}

Vector solve_stage(StageSolver& solver, const JacobianSample& jac, double h_gamma, const Vector& rhs) {
    try {
        return solver.solve(jac.matrix, jac.stamp, h_gamma, StageForm::scaled_identity, rhs);
    } catch (const SingularMatrixError& e) {
        throw StepError(std::string("singular stage matrix: ") + e.what());
    }
}

}  // namespace

TwoStepResult tsw_step(const OdeSystem& sys, const TwoStepWTableau& t, const TwoStepState& st,
                       double tn, double h, const JacobianSample& jac, StageSolver& solver) {
    const Index s = t.stages();
    check_state(sys, st, s, h, jac.matrix, "tsw_step");
    const Matrix& T = jac.matrix;
    const auto& prev = st.prev_stage_values;
    const std::size_t before = solver.factorizations();

    std::vector<Vector> cur;
    cur.reserve(static_cast<std::size_t>(s));
    for (Index i = 0; i < s; ++i) {
        Vector y = st.prev_state;
        Vector g = Vector::Zero(sys.dim);
        double ci = 0.0;
        for (Index j = 0; j < s; ++j) {
            const auto& pj = prev[static_cast<std::size_t>(j)];
            if (t.a_prev(i, j) != 0.0) y += (h * t.a_prev(i, j)) * pj;
            if (t.g_prev(i, j) != 0.0) g += t.g_prev(i, j) * pj;
        }
        for (Index j = 0; j < i; ++j) {
            const auto& cj = cur[static_cast<std::size_t>(j)];
            if (t.a_cur(i, j) != 0.0) y += (h * t.a_cur(i, j)) * cj;
            if (t.g_cur(i, j) != 0.0) g += t.g_cur(i, j) * cj;
            ci += t.a_cur(i, j);
        }
        const Vector rhs = sys.eval(tn + ci * h, y) + h * (T * g);
        cur.push_back(solve_stage(solver, jac, t.gamma * h, rhs));
    }

    TwoStepResult r;
    r.u_next = st.prev_state;
    for (Index i = 0; i < s; ++i) {
        r.u_next += (h * t.b(i)) * cur[static_cast<std::size_t>(i)];
        if (t.v(i) != 0.0) r.u_next += (h * t.v(i)) * prev[static_cast<std::size_t>(i)];
    }
    if (!r.u_next.allFinite()) throw StepError("tsw_step: non-finite state");
    r.next.prev_stage_values = std::move(cur);
    r.next.prev_state = r.u_next;
    r.next.h_prev = h;
    r.factorizations_used = solver.factorizations() - before;
    return r;
}

TwoStepResult peer_step(const OdeSystem& sys, const PeerTableau& t, const TwoStepState& st,
                        double tn, double h, const JacobianSample& jac, StageSolver& solver) {
    const Index s = t.stages();
    check_state(sys, st, s, h, jac.matrix, "peer_step");
    const Matrix& T = jac.matrix;
    const auto& prev = st.prev_stage_values;
    const std::size_t before = solver.factorizations();

    std::vector<Vector> defect;
    defect.reserve(static_cast<std::size_t>(s));
    for (Index j = 0; j < s; ++j) {
        const auto& pj = prev[static_cast<std::size_t>(j)];
        defect.push_back(sys.eval(tn + (t.nodes(j) - 1.0) * h, pj) - T * pj);
    }

    std::vector<Vector> cur;
    cur.reserve(static_cast<std::size_t>(s));
    for (Index i = 0; i < s; ++i) {
        Vector rhs = Vector::Zero(sys.dim);
        for (Index j = 0; j < s; ++j) {
            rhs += t.B(i, j) * prev[static_cast<std::size_t>(j)];
            if (t.A(i, j) != 0.0) rhs += (h * t.A(i, j)) * defect[static_cast<std::size_t>(j)];
        }
        if (i > 0) {
            Vector g = Vector::Zero(sys.dim);
            for (Index j = 0; j < i; ++j) g += t.G(i, j) * cur[static_cast<std::size_t>(j)];
            rhs += h * (T * g);
        }
        cur.push_back(solve_stage(solver, jac, t.gamma * h, rhs));
    }

    TwoStepResult r;
    r.u_next = cur.back();
    if (!r.u_next.allFinite()) throw StepError("peer_step: non-finite state");
    r.next.prev_stage_values = std::move(cur);
    r.next.prev_state = r.u_next;
    r.next.h_prev = h;
    r.factorizations_used = solver.factorizations() - before;
    return r;
}

ComplexMatrix peer_transfer_matrix(const PeerTableau& t, Complex z) {
    const Index s = t.stages();
    const Complex d = 1.0 - t.gamma * z;
    if (std::abs(d) == 0.0) throw ArgumentError("peer_transfer_matrix: z is the pole 1/gamma");
    // Stage i: d U_i - z sum_{j<i} G_ij U_j = (B U_prev)_i
    ComplexMatrix m(s, s);
    const ComplexMatrix b = t.B.cast<Complex>();
    for (Index i = 0; i < s; ++i) {
        Eigen::RowVectorXcd row = b.row(i);
        for (Index j = 0; j < i; ++j) row += (z * t.G(i, j)) * m.row(j);
        m.row(i) = row / d;
    }
    return m;
}

double spectral_radius(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw ArgumentError("spectral_radius: matrix is not square");
    if (m.size() == 0) return 0.0;
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

TwoStepWTableau startup_tableau(const TwoStepWTableau& t) {
    TwoStepWTableau r = t;
    r.a_prev.setZero();
    r.g_prev.setZero();
    r.v.setZero();
    return r;
}

}  // namespace

Trajectory integrate_twostep(const OdeSystem& sys,
                             const std::variant<TwoStepWTableau, PeerTableau>& method,
                             const TwoStepControl& ctrl) {
    if (ctrl.n_steps < 1) throw ArgumentError("integrate_twostep: n_steps must be at least 1");
    if (ctrl.startup_substeps < 1) throw ArgumentError("integrate_twostep: startup_substeps must be >= 1");
    if (ctrl.h && !(*ctrl.h > 0.0)) throw ArgumentError("integrate_twostep: h must be positive");
    const auto report = std::visit([](const auto& t) { return validate(t); }, method);
    if (!report.valid()) throw StructuralError("integrate_twostep: " + report.issues.front());
    const double h = ctrl.h.value_or((sys.t_end - sys.t0) / ctrl.n_steps);
    if (!(h > 0.0)) throw ArgumentError("integrate_twostep: t_end must exceed t0");

    const OdeSystem work = sys.autonomous ? sys : autonomize(sys);
    const Index n = sys.dim;
    JacobianEvaluator evaluator(work, ctrl.jacobian);
    StageSolver solver;

    Trajectory traj;
    Vector u = work.u0;
    double t = sys.t0;
    auto time_at = [&](int k) { return sys.t0 + k * h; };
    auto record = [&] {
        traj.times.push_back(t);
        traj.states.push_back(u.head(n));
    };
    record();

    auto failure = [&](const std::string& why) {
        return IntegrationFailure("integrate_twostep: " + why, t, u.head(n));
    };

    TwoStepState st;
    std::size_t before = solver.factorizations();
    try {
        std::visit(overloaded{
                       [&](const TwoStepWTableau& tab) {
                           st.prev_stage_values.assign(static_cast<std::size_t>(tab.stages()),
                                                       Vector::Zero(work.dim));
                           st.prev_state = u;
                           const auto& jac = evaluator.evaluate(t, u);
                           auto r = tsw_step(work, startup_tableau(tab), st, t, h, jac, solver);
                           st = std::move(r.next);
                           u = r.u_next;
                       },
                       [&](const PeerTableau& tab) {
                           const Index s = tab.stages();
                           if (std::abs(tab.nodes(s - 1) - 1.0) > 1e-14) {
                               throw ArgumentError("integrate_twostep: last peer node must be 1");
                           }
                           std::vector<Index> order(static_cast<std::size_t>(s));
                           std::iota(order.begin(), order.end(), Index{0});
                           std::sort(order.begin(), order.end(),
                                     [&](Index a, Index b) { return tab.nodes(a) < tab.nodes(b); });
                           st.prev_stage_values.assign(static_cast<std::size_t>(s), Vector());
                           Vector v = u;
                           double tc = t;
                           for (Index j : order) {
                               const double cj = tab.nodes(j);
                               if (cj < 0.0 || cj > 1.0) {
                                   throw ArgumentError("integrate_twostep: peer nodes must lie in [0, 1]");
                               }
                               const double tt = t + cj * h;
                               if (tt > tc) {
                                   const int sub = std::max(
                                       1, static_cast<int>(std::ceil(ctrl.startup_substeps * (tt - tc) / h - 1e-9)));
                                   v = lie_fixed_steps(work, v, tc, tt, sub, ctrl.jacobian);
                                   tc = tt;
                               }
                               st.prev_stage_values[static_cast<std::size_t>(j)] = v;
                           }
                           st.prev_state = st.prev_stage_values.back();
                           st.h_prev = h;
                           u = st.prev_state;
                       },
                   },
                   method);
    } catch (const StepError& e) {
        throw failure(e.what());
    } catch (const IntegrationFailure& e) {
        throw failure(e.what());
    }
    t = ctrl.n_steps == 1 && !ctrl.h ? sys.t_end : time_at(1);
    evaluator.accept(t, u);
    ++traj.accepted;
    traj.step_factorizations.push_back(solver.factorizations() - before);
    record();

    for (int k = 1; k < ctrl.n_steps; ++k) {
        before = solver.factorizations();
        try {
            const auto& jac = evaluator.evaluate(t, u);
            TwoStepResult r = std::visit(
                [&](const auto& tab) {
                    using Tab = std::decay_t<decltype(tab)>;
                    if constexpr (std::is_same_v<Tab, TwoStepWTableau>) {
                        return tsw_step(work, tab, st, t, h, jac, solver);
                    } else {
                        return peer_step(work, tab, st, t, h, jac, solver);
                    }
                },
                method);
            st = std::move(r.next);
            u = std::move(r.u_next);
        } catch (const StepError& e) {
            throw failure(e.what());
        } catch (const EvaluationError& e) {
            throw failure(e.what());
        }
        t = k + 1 == ctrl.n_steps && !ctrl.h ? sys.t_end : time_at(k + 1);
        evaluator.accept(t, u);
        ++traj.accepted;
        traj.step_factorizations.push_back(solver.factorizations() - before);
        record();
    }
    traj.jacobian_refreshes = evaluator.refreshes();
    traj.factorizations = solver.factorizations();
    return traj;
}

}  // namespace linrk
