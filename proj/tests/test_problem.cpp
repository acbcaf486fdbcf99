#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace linrk {
namespace {

Vector five_point_derivative(const ExactFn& u, double t, double dt) {
    return (-u(t + 2 * dt) + 8.0 * u(t + dt) - 8.0 * u(t - dt) + u(t - 2 * dt)) / (12.0 * dt);
}

TEST(Dahlquist, Examples) {
    const auto s = make_dahlquist(-1.0);
    EXPECT_EQ(s.dim, 1);
    EXPECT_EQ(s.eval(0.0, Vector::Constant(1, 2.0))(0), -2.0);
    EXPECT_EQ(s.jacobian(0.3, Vector::Constant(1, 5.0))(0, 0), -1.0);
    EXPECT_NEAR(s.exact(1.0)(0), 0.36787944117144233, 1e-15);
    EXPECT_EQ(s.u0(0), 1.0);
}

TEST(Dahlquist, ComplexEmbedding) {
    const auto s = make_dahlquist(Complex(-1.0, 2.0));
    EXPECT_EQ(s.dim, 2);
    const Vector f = s.eval(0.0, s.u0);
    EXPECT_EQ(f(0), -1.0);
    EXPECT_EQ(f(1), 2.0);
    const Complex e = std::exp(Complex(-1.0, 2.0));
    EXPECT_NEAR(s.exact(1.0)(0), e.real(), 1e-15);
    EXPECT_NEAR(s.exact(1.0)(1), e.imag(), 1e-15);
}

TEST(Heat1d, ThreePointMatrix) {
    const Matrix a = heat1d_matrix(3, 1.0);
    Matrix expected(3, 3);
    expected << -32, 16, 0, 16, -32, 16, 0, 16, -32;
    EXPECT_EQ(a, expected);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    EXPECT_LT(es.eigenvalues().maxCoeff(), 0.0);

    const auto s = make_heat1d(3, 1.0);
    const Vector f = s.eval(0.0, Vector::Ones(3));
    EXPECT_EQ(f(0), -16.0);
    EXPECT_EQ(f(1), 0.0);
    EXPECT_EQ(f(2), -16.0);
}

TEST(Heat1d, SymmetricNegativeDefiniteForManySizes) {
    for (Index n : {1, 2, 5, 20, 60}) {
        for (double d : {0.01, 1.0, 7.5}) {
            const Matrix a = heat1d_matrix(n, d);
            EXPECT_EQ((a - a.transpose()).cwiseAbs().maxCoeff(), 0.0);
            const double hx = 1.0 / static_cast<double>(n + 1);
            Eigen::SelfAdjointEigenSolver<Matrix> es(a);
            Vector closed(n);
            for (Index k = 1; k <= n; ++k) {
                const double s = std::sin(k * std::numbers::pi * hx / 2.0);
                closed(k - 1) = -4.0 * d / (hx * hx) * s * s;
            }
            std::sort(closed.data(), closed.data() + n);
            EXPECT_LT(closed.maxCoeff(), 0.0);
            EXPECT_LE((es.eigenvalues() - closed).cwiseAbs().maxCoeff(),
                      1e-10 * closed.cwiseAbs().maxCoeff());
        }
    }
}

TEST(Heat1d, ArgumentErrors) {
    EXPECT_THROW((void)make_heat1d(0, 1.0), ArgumentError);
    EXPECT_THROW((void)make_heat1d(3, 0.0), ArgumentError);
    EXPECT_THROW((void)make_heat1d(3, -1.0), ArgumentError);
}

TEST(OrderReduction, Construction) {
    const auto s = make_order_reduction_problem(-1e6);
    EXPECT_FALSE(s.autonomous);
    EXPECT_EQ(s.u0(0), 0.0);
    EXPECT_EQ(s.exact(0.7)(0), std::sin(0.7));
    EXPECT_NEAR(s.eval(0.7, s.exact(0.7))(0), std::cos(0.7), 1e-15);
    EXPECT_THROW((void)make_order_reduction_problem(0.0), ArgumentError);
    EXPECT_THROW((void)make_order_reduction_problem(2.0), ArgumentError);
}

TEST(Problems, ExactMapsSatisfyTheOde) {
    const std::vector<OdeSystem> systems{make_dahlquist(-1.0), make_dahlquist(Complex(-0.5, 3.0)),
                                         make_heat1d(20, 1.0), make_heat1d(7, 0.1),
                                         make_order_reduction_problem(-1.0),
                                         make_order_reduction_problem(-1e6)};
    for (const auto& s : systems) {
        for (double t : {0.1, 0.35, 0.6, 0.9}) {
            const Vector u = s.exact(t);
            const Vector du = five_point_derivative(s.exact, t, 1e-3);
            const double scale = std::max(1.0, u.lpNorm<Eigen::Infinity>());
            EXPECT_LE((s.eval(t, u) - du).lpNorm<Eigen::Infinity>(), 1e-8 * scale) << s.name << " t=" << t;
        }
    }
}

TEST(Problems, EvalChecksDimensions) {
    const auto s = make_dahlquist(-1.0);
    EXPECT_THROW((void)s.eval(0.0, Vector::Ones(2)), ArgumentError);
    OdeSystem bad = s;
    bad.rhs = [](double, const Vector&) -> Vector { return Vector::Ones(3); };
    EXPECT_THROW((void)bad.eval(0.0, Vector::Ones(1)), EvaluationError);
}

TEST(Jacobian, ForwardDifferenceDahlquist) {
    const auto s = make_dahlquist(-1.0);
    const Matrix j = forward_difference_jacobian(s, 0.0, Vector::Constant(1, 0.3), std::sqrt(2.2e-16));
    EXPECT_NEAR(j(0, 0), -1.0, 1e-6);
}

TEST(Jacobian, ForwardDifferenceLinearSystems) {
    for (Index n : {3, 20}) {
        const auto s = make_heat1d(n, 1.0);
        const Matrix a = heat1d_matrix(n, 1.0);
        JacobianEvaluator ev(s, jacobian::ForwardDifference{});
        const Matrix j = ev.evaluate(0.0, s.u0).matrix;
        const double scale = a.cwiseAbs().maxCoeff();
        EXPECT_LE((j - a).cwiseAbs().maxCoeff(), 1e-6 * scale) << "n=" << n;
    }
    // Entrywise absolute agreement on the small matrix.
    const auto s3 = make_heat1d(3, 1.0);
    const Matrix j3 = forward_difference_jacobian(s3, 0.0, s3.u0, std::sqrt(2.2e-16));
    EXPECT_LE((j3 - heat1d_matrix(3, 1.0)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Jacobian, IncrementScalesWithState) {
    // f = u^2: the forward quotient is 2u + du, so the increment is visible.
    OdeSystem s;
    s.name = "square";
    s.dim = 1;
    s.rhs = [](double, const Vector& u) -> Vector { return u.cwiseProduct(u); };
    s.u0 = Vector::Constant(1, 1e4);
    const double eps = 1e-6;
    const Matrix j = forward_difference_jacobian(s, 0.0, s.u0, eps);
    EXPECT_NEAR(j(0, 0), 2e4 + eps * 1e4, 1e-3);
}

TEST(Jacobian, NonFiniteColumnIsReported) {
    OdeSystem s;
    s.name = "edge";
    s.dim = 2;
    s.rhs = [](double, const Vector& u) -> Vector {
        Vector f(2);
        f << u(0), std::sqrt(1.0 - u(1));
        return f;
    };
    Vector u(2);
    u << 0.5, 1.0;
    try {
        (void)forward_difference_jacobian(s, 0.0, u, 1e-8);
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        EXPECT_EQ(e.column(), 1);
    }
}

TEST(Jacobian, FrozenReusesForMaxAgeSteps) {
    const auto s = make_heat1d(5, 1.0);
    JacobianEvaluator ev(s, jacobian::Frozen{5});
    Vector u = s.u0;
    const auto first = ev.evaluate(0.0, u);
    for (int k = 0; k < 5; ++k) {
        const auto& j = ev.evaluate(0.1 * k, u);
        EXPECT_EQ(j.stamp, first.stamp);
        EXPECT_EQ(j.matrix, first.matrix);
        u *= 0.9;
        ev.accept(0.1 * (k + 1), u);
    }
    EXPECT_NE(ev.evaluate(0.5, u).stamp, first.stamp);
    EXPECT_EQ(ev.refreshes(), 2u);
}

TEST(Jacobian, FrozenRefreshesAfterTwoRejections) {
    const auto s = make_heat1d(4, 1.0);
    JacobianEvaluator ev(s, jacobian::Frozen{50});
    const auto a = ev.evaluate(0.0, s.u0).stamp;
    ev.reject();
    EXPECT_EQ(ev.evaluate(0.0, s.u0).stamp, a);
    ev.reject();
    EXPECT_NE(ev.evaluate(0.0, s.u0).stamp, a);
}

TEST(Jacobian, AnalyticRefreshesPerPointOnly) {
    const auto s = make_heat1d(4, 1.0);
    JacobianEvaluator ev(s, jacobian::Analytic{});
    const auto a = ev.evaluate(0.0, s.u0).stamp;
    ev.reject();
    EXPECT_EQ(ev.evaluate(0.0, s.u0).stamp, a);
    ev.accept(0.1, 0.5 * s.u0);
    EXPECT_NE(ev.evaluate(0.1, 0.5 * s.u0).stamp, a);
}

TEST(Jacobian, TimeLaggedUsesPreviousAcceptedState) {
    OdeSystem s;
    s.name = "square";
    s.dim = 1;
    s.rhs = [](double, const Vector& u) -> Vector { return u.cwiseProduct(u); };
    s.jacobian = [](double, const Vector& u) -> Matrix { return Matrix::Constant(1, 1, 2.0 * u(0)); };
    JacobianEvaluator ev(s, jacobian::TimeLagged{});
    auto v = [](double x) { return Vector::Constant(1, x); };
    EXPECT_EQ(ev.evaluate(0.0, v(1.0)).matrix(0, 0), 2.0);
    ev.accept(0.1, v(2.0));
    EXPECT_EQ(ev.evaluate(0.1, v(2.0)).matrix(0, 0), 2.0);
    ev.accept(0.2, v(3.0));
    EXPECT_EQ(ev.evaluate(0.2, v(3.0)).matrix(0, 0), 4.0);
    ev.accept(0.3, v(4.0));
    EXPECT_EQ(ev.evaluate(0.3, v(4.0)).matrix(0, 0), 6.0);
}

TEST(Jacobian, StrategyChecks) {
    EXPECT_THROW(check_strategy(jacobian::ForwardDifference{0.0}), ArgumentError);
    EXPECT_THROW(check_strategy(jacobian::Frozen{0}), ArgumentError);
    EXPECT_NO_THROW(check_strategy(jacobian::TimeLagged{}));
    OdeSystem s = make_dahlquist(-1.0);
    s.jacobian = nullptr;
    EXPECT_THROW(JacobianEvaluator(s, jacobian::Analytic{}), ArgumentError);
    EXPECT_NO_THROW(JacobianEvaluator(s, jacobian::ForwardDifference{}));
}

TEST(Autonomize, BordersTheJacobian) {
    const auto s = autonomize(make_order_reduction_problem(-3.0));
    EXPECT_EQ(s.dim, 2);
    EXPECT_TRUE(s.autonomous);
    Vector v(2);
    v << 0.2, 0.5;
    const Vector f = s.eval(123.0, v);
    EXPECT_NEAR(f(0), -3.0 * (0.2 - std::sin(0.5)) + std::cos(0.5), 1e-15);
    EXPECT_EQ(f(1), 1.0);
    const Matrix j = s.jacobian(0.0, v);
    EXPECT_EQ(j(0, 0), -3.0);
    EXPECT_NEAR(j(0, 1), 3.0 * std::cos(0.5) - std::sin(0.5), 1e-15);
    EXPECT_EQ(j(1, 0), 0.0);
    EXPECT_EQ(j(1, 1), 0.0);
    EXPECT_EQ(s.exact(0.4)(1), 0.4);
}

TEST(Autonomize, FiniteDifferenceTimeColumn) {
    auto p = make_order_reduction_problem(-3.0);
    p.time_derivative = nullptr;
    const auto s = autonomize(p);
    Vector v(2);
    v << 0.2, 0.5;
    EXPECT_NEAR(s.jacobian(0.0, v)(0, 1), 3.0 * std::cos(0.5) - std::sin(0.5), 1e-6);
}

TEST(Autonomize, AutonomousInputUnchanged) {
    const auto base = make_heat1d(8, 1.0);
    const auto clocked = autonomize(base);
    for (const auto& t : {lie1(), ros2d(), row3n()}) {
        const Vector a = testing::fixed_run(base, t, 0.05);
        const Vector b = testing::fixed_run(clocked, t, 0.05);
        EXPECT_LE((a - b.head(8)).lpNorm<Eigen::Infinity>(), 1e-12) << t.name;
        EXPECT_NEAR(b(8), 1.0, 1e-12);
    }
}

TEST(Autonomize, ClockAfterOneStep) {
    const auto s = autonomize(make_order_reduction_problem(-1.0));
    const double h = 0.1;
    const auto out = row_step(s, lie1(), s.u0, 0.0, h, s.jacobian(0.0, s.u0), StepMode::direct);
    EXPECT_EQ(out.u_next(1), h);
}

}  // namespace
}  // namespace linrk
