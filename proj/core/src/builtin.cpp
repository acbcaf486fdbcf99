#include "linrk/builtin.hpp"

#include <cmath>

namespace linrk {

RowTableau lie1() {
    RowTableau t;
    t.name = "LIE1";
    t.alpha = Matrix::Zero(1, 1);
    t.gamma = Matrix::Constant(1, 1, 1.0);
    t.b = Vector::Constant(1, 1.0);
    t.order = 1;
    return t;
}

RowTableau ros2d() {
    const double g = 1.0 - 1.0 / std::sqrt(2.0);
    RowTableau t;
    t.name = "ROS2D";
    t.alpha = Matrix::Zero(2, 2);
    t.alpha(1, 0) = 1.0;
    t.gamma = Matrix::Zero(2, 2);
    t.gamma << g, 0.0, -2.0 * g, g;
    t.b = Vector(2);
    t.b << 0.5, 0.5;
    t.b_hat = Vector(2);
    *t.b_hat << 1.0, 0.0;
    t.order = 2;
    t.embedded_order = 1;
    return t;
}

RowTableau row3n() {
    RowTableau t;
    t.name = "ROW3N";
    t.alpha = Matrix::Zero(3, 3);
    t.alpha(1, 0) = 0.5;
    t.alpha(2, 1) = 1.0;
    t.gamma = Matrix::Zero(3, 3);
    t.gamma.diagonal().setConstant(0.5);
    t.gamma(1, 0) = -1.0;
    t.gamma(2, 0) = 1.0;
    t.b = Vector(3);
    t.b << 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0;
    t.b_hat = Vector(3);
    *t.b_hat << 0.0, 0.8, 0.2;
    t.order = 3;
    t.embedded_order = 2;
    return t;
}

TwoStepWTableau tsw2() {
    TwoStepWTableau t;
    t.name = "TSW2";
    t.gamma = 1.0;
    t.a_prev = Matrix::Zero(2, 2);
    t.a_prev(0, 1) = 1.0 / 3.0;
    t.g_prev = Matrix::Zero(2, 2);
    t.g_prev(0, 0) = -0.5;
    t.g_prev(0, 1) = -1.0 / 6.0;
    t.a_cur = Matrix::Zero(2, 2);
    t.a_cur(1, 0) = 1.0;
    t.g_cur = Matrix::Zero(2, 2);
    t.g_cur(1, 0) = -2.0;
    t.b = Vector(2);
    t.b << 0.5, 0.5;
    t.v = Vector(2);
    t.v << 0.25, -0.25;
    t.order = 2;
    return t;
}

PeerTableau peer2() {
    PeerTableau t;
    t.name = "PEER2";
    t.gamma = 1.0 / 3.0;
    t.B = Matrix(2, 2);
    t.B << -1.0 / 3.0, 4.0 / 3.0, -4.0 / 9.0, 13.0 / 9.0;
    t.A = Matrix(2, 2);
    t.A << -1.0 / 3.0, 2.0 / 3.0, -10.0 / 9.0, 17.0 / 9.0;
    t.G = Matrix::Zero(2, 2);
    t.G(1, 0) = 4.0 / 9.0;
    t.nodes = Vector(2);
    t.nodes << 0.5, 1.0;
    t.order = 2;
    return t;
}

const std::string& method_name(const MethodTableau& m) {
    return std::visit([](const auto& t) -> const std::string& { return t.name; }, m);
}

int method_order(const MethodTableau& m) {
    return std::visit([](const auto& t) { return t.order; }, m);
}

std::vector<MethodTableau> builtin_methods() {
    return {lie1(), ros2d(), row3n(), tsw2(), peer2()};
}

std::optional<MethodTableau> find_builtin(std::string_view name) {
    for (auto& m : builtin_methods()) {
        if (method_name(m) == name) return m;
    }
    return std::nullopt;
}

}  // namespace linrk
