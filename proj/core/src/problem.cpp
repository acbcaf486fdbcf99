#include "linrk/problem.hpp"

#include "linrk/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace linrk {

Vector OdeSystem::eval(double t, const Vector& u) const {
    if (u.size() != dim) {
        throw ArgumentError(name + ": state has length " + std::to_string(u.size()) + ", expected " +
                            std::to_string(dim));
    }
    Vector f = rhs(t, u);
    if (f.size() != dim) {
        throw EvaluationError(name + ": right-hand side returned length " + std::to_string(f.size()),
                              -1);
    }
    return f;
}

OdeSystem make_dahlquist(double lambda) {
    OdeSystem s;
    s.name = "dahlquist";
    s.dim = 1;
    s.rhs = [lambda](double, const Vector& u) -> Vector { return lambda * u; };
    s.jacobian = [lambda](double, const Vector&) -> Matrix { return Matrix::Constant(1, 1, lambda); };
    s.u0 = Vector::Ones(1);
    s.exact = [lambda](double t) -> Vector { return Vector::Constant(1, std::exp(lambda * t)); };
    return s;
}

OdeSystem make_dahlquist(Complex lambda) {
    Matrix a(2, 2);
    a << lambda.real(), -lambda.imag(), lambda.imag(), lambda.real();
    OdeSystem s;
    s.name = "dahlquist";
    s.dim = 2;
    s.rhs = [a](double, const Vector& u) -> Vector { return a * u; };
    s.jacobian = [a](double, const Vector&) -> Matrix { return a; };
    s.u0 = Vector(2);
    s.u0 << 1.0, 0.0;
    s.exact = [lambda](double t) -> Vector {
        const Complex y = std::exp(lambda * t);
        Vector v(2);
        v << y.real(), y.imag();
        return v;
    };
    return s;
}

Matrix heat1d_matrix(Index n_interior, double d) {
    if (n_interior < 1) throw ArgumentError("heat1d needs at least one interior point");
    if (!(d > 0.0)) throw ArgumentError("heat1d diffusion coefficient must be positive");
    const double hx = 1.0 / static_cast<double>(n_interior + 1);
    const double k = d / (hx * hx);
    Matrix a = Matrix::Zero(n_interior, n_interior);
    for (Index i = 0; i < n_interior; ++i) {
        a(i, i) = -2.0 * k;
        if (i > 0) a(i, i - 1) = k;
        if (i + 1 < n_interior) a(i, i + 1) = k;
    }
    return a;
}

OdeSystem make_heat1d(Index n_interior, double d) {
    const Matrix a = heat1d_matrix(n_interior, d);
    const double hx = 1.0 / static_cast<double>(n_interior + 1);
    const double s = std::sin(std::numbers::pi * hx / 2.0);
    const double mu = -4.0 * d / (hx * hx) * s * s;

    Vector u0(n_interior);
    for (Index i = 0; i < n_interior; ++i) {
        u0(i) = std::sin(std::numbers::pi * hx * static_cast<double>(i + 1));
    }

    OdeSystem sys;
    sys.name = "heat1d";
    sys.dim = n_interior;
    sys.rhs = [a](double, const Vector& u) -> Vector { return a * u; };
    sys.jacobian = [a](double, const Vector&) -> Matrix { return a; };
    sys.u0 = u0;
    sys.exact = [u0, mu](double t) -> Vector { return std::exp(mu * t) * u0; };
    return sys;
}

OdeSystem make_order_reduction_problem(double lambda_stiff) {
    if (!(lambda_stiff < 0.0)) throw ArgumentError("protrob: lambda must be negative");
    const double l = lambda_stiff;
    OdeSystem s;
    s.name = "protrob";
    s.dim = 1;
    s.autonomous = false;
    s.rhs = [l](double t, const Vector& u) -> Vector {
        return Vector::Constant(1, l * (u(0) - std::sin(t)) + std::cos(t));
    };
    s.jacobian = [l](double, const Vector&) -> Matrix { return Matrix::Constant(1, 1, l); };
    s.time_derivative = [l](double t, const Vector&) -> Vector {
        return Vector::Constant(1, -l * std::cos(t) - std::sin(t));
    };
    s.u0 = Vector::Zero(1);
    s.exact = [](double t) -> Vector { return Vector::Constant(1, std::sin(t)); };
    return s;
}

namespace {

Vector fd_time_derivative(const OdeSystem& sys, double t, const Vector& u) {
    const double dt = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(std::abs(t), 1.0);
    return (sys.eval(t + dt, u) - sys.eval(t, u)) / dt;
}

}  // namespace

OdeSystem autonomize(const OdeSystem& sys) {
    const Index n = sys.dim;
    OdeSystem out;
    out.name = sys.name;
    out.dim = n + 1;
    out.autonomous = true;
    out.t0 = sys.t0;
    out.t_end = sys.t_end;
    out.u0 = Vector(n + 1);
    out.u0 << sys.u0, sys.t0;

    out.rhs = [sys, n](double, const Vector& v) -> Vector {
        Vector r(n + 1);
        r << sys.eval(v(n), v.head(n)), 1.0;
        return r;
    };
    if (sys.has_jacobian()) {
        out.jacobian = [sys, n](double, const Vector& v) -> Matrix {
            const double t = v(n);
            const Vector u = v.head(n);
            Matrix j = Matrix::Zero(n + 1, n + 1);
            j.topLeftCorner(n, n) = sys.jacobian(t, u);
            j.topRightCorner(n, 1) =
                sys.time_derivative ? sys.time_derivative(t, u) : fd_time_derivative(sys, t, u);
            return j;
        };
    }
    if (sys.has_exact()) {
        out.exact = [sys, n](double t) -> Vector {
            Vector r(n + 1);
            r << sys.exact(t), t;
            return r;
        };
    }
    return out;
}

}  // namespace linrk
