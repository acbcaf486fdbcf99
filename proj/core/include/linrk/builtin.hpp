#pragma once

#include "linrk/tableau.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace linrk {

/// Linearly implicit Euler: s = 1, gamma = 1, b = 1. Order 1, L-stable.
[[nodiscard]] RowTableau lie1();

/// Two-stage order-2 ROW/W method with R(inf) = 0 and an order-1 embedding.
[[nodiscard]] RowTableau ros2d();

/// Three-stage order-3 A-stable ROW method with an order-2 embedding.
[[nodiscard]] RowTableau row3n();

/// Two-stage order-2 two-step W-method.
[[nodiscard]] TwoStepWTableau tsw2();

/// Two-stage order-2 Rosenbrock-Peer method with nodes (1/2, 1).
[[nodiscard]] PeerTableau peer2();

using MethodTableau = std::variant<RowTableau, TwoStepWTableau, PeerTableau>;

[[nodiscard]] const std::string& method_name(const MethodTableau& m);
[[nodiscard]] int method_order(const MethodTableau& m);

/// LIE1, ROS2D, ROW3N, TSW2, PEER2 in that order.
[[nodiscard]] std::vector<MethodTableau> builtin_methods();

/// Case-sensitive lookup by name.
[[nodiscard]] std::optional<MethodTableau> find_builtin(std::string_view name);

}  // namespace linrk
