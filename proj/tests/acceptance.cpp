#include "support.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace {

using namespace linrk;
using testing::fixed_run;
using testing::rel_diff;
using testing::slope_of;
using testing::twostep_run;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<RowTableau> row_tableaus() {
    std::vector<RowTableau> out;
    for (const auto& m : builtin_methods()) {
        if (const auto* t = std::get_if<RowTableau>(&m)) out.push_back(*t);
    }
    return out;
}

double trajectory_diff(const Trajectory& a, const Trajectory& b) {
    if (a.states.size() != b.states.size()) return INFINITY;
    double worst = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) worst = std::max(worst, rel_diff(a.states[k], b.states[k]));
    return worst;
}

Outcome transformation_equivalence() {
    std::vector<OdeSystem> problems = {make_heat1d(20, 1.0), make_order_reduction_problem(-1.0),
                                       make_order_reduction_problem(-1e6), make_dahlquist(-1.0)};
    double worst = 0.0;
    for (const auto& t : row_tableaus()) {
        for (const auto& s : problems) {
            for (bool fixed : {true, false}) {
                IntegrationControl ctrl;
                ctrl.fixed_step = fixed;
                ctrl.h0 = 1.0 / 32;
                ctrl.mode = StepMode::direct;
                const auto d = integrate(s, t, ctrl);
                ctrl.mode = StepMode::transformed;
                const auto r = integrate(s, t, ctrl);
                worst = std::max(worst, trajectory_diff(d, r));
            }
        }
    }
    return {worst <= 1e-10, fmt("max relative difference %.3e", worst)};
}

Outcome round_trip() {
    std::mt19937 rng(2024);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto t = testing::random_tableau(rng, 1 + k % 4);
        const auto back = inverse_transform(transform(t));
        worst = std::max({worst, (back.alpha - t.alpha).cwiseAbs().maxCoeff(),
                          (back.gamma - t.gamma).cwiseAbs().maxCoeff(),
                          (back.b - t.b).cwiseAbs().maxCoeff(),
                          (*back.b_hat - *t.b_hat).cwiseAbs().maxCoeff()});
    }
    return {worst <= 1e-12, fmt("max entry difference %.3e", worst)};
}

Outcome order_verification() {
    const auto s = make_dahlquist(-1.0);
    bool ok = true;
    std::string detail;
    for (const auto& m : builtin_methods()) {
        const double p = std::visit(
            [&](const auto& t) -> double {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, RowTableau>) {
                    return slope_of([&](double h) { return fixed_run(s, t, h); }, s);
                } else {
                    return slope_of([&](double h) { return twostep_run(s, t, h); }, s);
                }
            },
            m);
        const int order = method_order(m);
        ok = ok && std::abs(p - order) <= 0.1;
        detail += method_name(m) + fmt("=%.3f ", p);
    }
    return {ok, detail};
}

Outcome stability_classification() {
    const auto lie = classify(lie1());
    const auto cn = classify(CrankNicolson{});
    const ExplicitRkPolynomial rk4{4, {}};
    const auto erk = classify(rk4);
    const double r3 = std::abs(stability_function(rk4, -3.0));
    const bool ok = lie.l_stable && cn.a_stable && !cn.l_stable &&
                    std::abs(cn.r_infinity - Complex(-1.0)) <= 1e-12 && !erk.a_stable &&
                    std::abs(r3 - 1.375) <= 1e-12;
    return {ok, "LIE1 l_stable=" + std::string(lie.l_stable ? "true" : "false") +
                    " CN a_stable=" + (cn.a_stable ? "true" : "false") +
                    " l_stable=" + (cn.l_stable ? "true" : "false") +
                    fmt(" R(inf)=%.3f", cn.r_infinity.real()) +
                    " RK4 a_stable=" + (erk.a_stable ? "true" : "false") + fmt(" |R(-3)|=%.15f", r3)};
}

Outcome heat_damping() {
    const auto s = make_heat1d(20, 1.0);
    const Matrix a = heat1d_matrix(20, 1.0);
    bool monotone = true;
    for (double h : {0.1, 1.0, 10.0}) {
        Vector u = s.u0;
        for (int k = 0; k < 50; ++k) {
            const Vector next = row_step(s, lie1(), u, k * h, h, a).u_next;
            monotone = monotone && next.norm() <= u.norm();
            u = next;
        }
    }
    Vector u = s.u0;
    const Matrix zero = Matrix::Zero(s.dim, s.dim);
    double growth = 1.0;
    for (int k = 0; k < 50; ++k) {
        u = row_step(s, lie1(), u, k * 1.0, 1.0, zero).u_next;
        growth = u.norm() / s.u0.norm();
        if (growth > 1e10) break;
    }
    return {monotone && growth > 1e10, std::string("LIE1 monotone=") + (monotone ? "true" : "false") +
                                           fmt(" explicit Euler growth %.3e", growth)};
}

Outcome rosenbrock_two_stage() {
    // Taylor matching to z^3 with equal gamma gives gamma^2 - gamma + 1/6 = 0.
    const double g_lo = (3.0 - std::sqrt(3.0)) / 6.0;
    const double g_hi = (3.0 + std::sqrt(3.0)) / 6.0;
    const auto fam = two_stage_third_order_family();
    bool ok = fam.size() == 2;
    std::string detail;
    for (const auto& m : fam) {
        const double rinf = r_infinity(m.tableau).real();
        // R(inf) of the equal-gamma two-stage function, (1/2 - 2g + g^2) / g^2
        const double ref = (0.5 - 2.0 * m.gamma + m.gamma * m.gamma) / (m.gamma * m.gamma);
        const double gref = m.gamma < 0.5 ? g_lo : g_hi;
        ok = ok && std::abs(m.gamma - gref) <= 1e-12 && std::abs(rinf - ref) <= 1e-6 &&
             std::abs(rinf) > 1e-6;
        detail += fmt("gamma=%.6f ", m.gamma) + fmt("R(inf)=%.6f ", rinf);
    }
    return {ok, detail + "no member with R(inf)=0"};
}

Outcome w_consistency() {
    const auto heat = make_heat1d(20, 1.0);
    const Matrix a = heat1d_matrix(20, 1.0);
    double worst = 0.0;
    for (const auto& t : row_tableaus()) {
        Vector u = heat.u0;
        for (int k = 0; k < 10; ++k) u = row_step(heat, t, u, k * 0.1, 0.1, a).u_next;
        worst = std::max(worst, rel_diff(u, fixed_run(heat, t, 0.1)));
        const auto pr = make_order_reduction_problem(-10.0);
        worst = std::max(worst, rel_diff(fixed_run(pr, t, 0.05, StepMode::transformed, jacobian::Frozen{1}),
                                         fixed_run(pr, t, 0.05)));
    }
    auto s = make_heat1d(20, 1.0);
    s.t_end = 0.1;
    const Vector exact = s.exact(s.t_end);
    std::vector<ConvergencePoint> pts;
    double worst_ratio = 0.0;
    for (int n : {20, 40, 80, 160}) {
        IntegrationControl ctrl;
        ctrl.fixed_step = true;
        ctrl.h0 = s.t_end / n;
        const auto ref = integrate(s, ros2d(), ctrl);
        ctrl.jacobian = jacobian::Frozen{5};
        const auto w = integrate(s, ros2d(), ctrl);
        worst_ratio = std::max(worst_ratio, static_cast<double>(w.factorizations) /
                                                static_cast<double>(ref.factorizations));
        ConvergencePoint p;
        p.h = ctrl.h0.value();
        p.error = (w.final_state() - exact).lpNorm<Eigen::Infinity>();
        pts.push_back(p);
    }
    const double slope = fitted_slope(pts);
    return {worst <= 1e-12 && slope >= 1.0 && worst_ratio <= 0.2,
            fmt("W/ROW difference %.3e", worst) + fmt(" Frozen(5) slope %.3f", slope) +
                fmt(" factorization ratio %.3f", worst_ratio)};
}

Outcome extrapolated_lie() {
    const auto s = make_dahlquist(-1.0);
    const Vector exact = s.exact(1.0);
    bool ok = true;
    std::string detail;
    for (int k = 0; k < 3; ++k) {
        std::vector<ConvergencePoint> pts;
        for (int base : {8, 16, 32, 64}) {
            const auto table = extrapolate_lie(s, s.u0, 0.0, 1.0, base, k + 1);
            ConvergencePoint p;
            p.h = 1.0 / base;
            p.error = (table.entries[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] - exact)
                          .lpNorm<Eigen::Infinity>();
            pts.push_back(p);
        }
        const double slope = fitted_slope(pts);
        ok = ok && std::abs(slope - (k + 1)) <= 0.2;
        detail += "column " + std::to_string(k + 1) + fmt(" %.3f ", slope);
    }
    return {ok, detail};
}

Outcome twostep_reduction() {
    std::vector<OdeSystem> problems = {make_heat1d(20, 1.0), make_dahlquist(-1.0),
                                       autonomize(make_order_reduction_problem(-1.0)),
                                       autonomize(make_order_reduction_problem(-1e6))};
    double worst = 0.0;
    std::vector<RowTableau> methods = row_tableaus();
    methods.push_back(one_step_reduction(tsw2()));
    for (const auto& t : methods) {
        auto w = embed_as_two_step(t);
        for (const auto& s : problems) {
            TwoStepState st;
            st.prev_stage_values.assign(static_cast<std::size_t>(t.stages()), Vector::Ones(s.dim));
            st.prev_state = s.u0;
            Vector u = s.u0;
            for (int k = 0; k < 5; ++k) {
                const double tn = s.t0 + 0.1 * k;
                const Matrix j = exact_or_fd_jacobian(s, tn, u);
                StageSolver solver;
                const auto r = tsw_step(s, w, st, tn, 0.1, {j, next_jacobian_stamp()}, solver);
                const auto o = row_step(s, t, u, tn, 0.1, j, StepMode::direct);
                worst = std::max(worst, rel_diff(r.u_next, o.u_next));
                st = r.next;
                u = o.u_next;
            }
        }
    }
    return {worst <= 1e-12, fmt("max relative difference %.3e", worst)};
}

Outcome peer_stability() {
    const auto t = peer2();
    double worst = spectral_radius(peer_transfer_matrix(t, 0.0));
    const double at_zero = worst;
    for (int k = 0; k < 50; ++k) {
        const double z = -std::pow(10.0, -4.0 + 12.0 * k / 49.0);
        worst = std::max(worst, spectral_radius(peer_transfer_matrix(t, z)));
    }
    return {worst <= 1.0 + 1e-8, fmt("rho(M(0))=%.12f", at_zero) + fmt(" max rho(M(z))=%.12f", worst)};
}

Outcome order_reduction() {
    const auto mild = make_order_reduction_problem(-1.0);
    const auto stiff = make_order_reduction_problem(-1e6);
    const double p_mild = slope_of([&](double h) { return fixed_run(mild, row3n(), h); }, mild);
    const double p_stiff = slope_of([&](double h) { return fixed_run(stiff, row3n(), h); }, stiff);
    return {std::abs(p_mild - 3.0) <= 0.15 && p_stiff <= 2.5,
            fmt("lambda=-1 slope %.3f", p_mild) + fmt(" lambda=-1e6 slope %.3f", p_stiff)};
}

Outcome factorization_reuse() {
    std::vector<RowTableau> methods = row_tableaus();
    for (const auto& m : two_stage_third_order_family()) methods.push_back(m.tableau);
    const std::vector<OdeSystem> problems = {make_heat1d(20, 1.0), make_order_reduction_problem(-1e6)};
    std::size_t lo = 1000;
    std::size_t hi = 0;
    std::size_t steps = 0;
    auto tally = [&](const std::vector<std::size_t>& counts, std::size_t skip) {
        for (std::size_t k = skip; k < counts.size(); ++k) {
            lo = std::min(lo, counts[k]);
            hi = std::max(hi, counts[k]);
            ++steps;
        }
    };
    for (const auto& t : methods) {
        if (!validate(t).single_gamma) continue;
        for (const auto& s : problems) {
            for (bool fixed : {true, false}) {
                // Richardson control factors for h/2 as well; only embedded pairs run adaptively.
                if (!fixed && !t.has_embedded()) continue;
                IntegrationControl ctrl;
                ctrl.fixed_step = fixed;
                ctrl.h0 = 0.02;
                ctrl.atol = ctrl.rtol = 1e-5;
                tally(integrate(s, t, ctrl).step_factorizations, 0);
            }
        }
    }
    for (const std::variant<TwoStepWTableau, PeerTableau>& m :
         {std::variant<TwoStepWTableau, PeerTableau>(tsw2()), std::variant<TwoStepWTableau, PeerTableau>(peer2())}) {
        for (const auto& s : problems) {
            TwoStepControl ctrl;
            ctrl.n_steps = 50;
            tally(integrate_twostep(s, m, ctrl).step_factorizations, 1);
        }
    }
    return {lo == 1 && hi == 1,
            "factorizations per accepted step min " + std::to_string(lo) + " max " + std::to_string(hi) +
                " over " + std::to_string(steps) + " steps"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"transformation equivalence", transformation_equivalence},
        {"transform round trip", round_trip},
        {"order verification", order_verification},
        {"stability classification", stability_classification},
        {"heat equation damping", heat_damping},
        {"two-stage third-order family", rosenbrock_two_stage},
        {"W/ROW consistency", w_consistency},
        {"extrapolated LIE orders", extrapolated_lie},
        {"two-step reduction", twostep_reduction},
        {"peer stability", peer_stability},
        {"order reduction", order_reduction},
        {"single-gamma factorization reuse", factorization_reuse},
    };
    int failures = 0;
    int id = 1;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id++, name, o.detail.c_str());
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
