#pragma once

#include "linrk/types.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linrk {

/// Tableau coefficients violate a structural requirement (triangularity,
/// zero diagonal, inconsistent lengths).
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed an argument outside an operation's precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A right-hand side evaluation produced non-finite values.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, Index column)
        : std::runtime_error(what), column_(column) {}

    /// Offending Jacobian column, -1 when not tied to one.
    [[nodiscard]] Index column() const noexcept { return column_; }

private:
    Index column_;
};

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, Index pivot)
        : std::runtime_error(what), pivot_(pivot) {}

    [[nodiscard]] Index pivot() const noexcept { return pivot_; }

private:
    Index pivot_;
};

/// A single step could not be completed; the caller may retry with smaller h.
class StepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integration gave up. Carries the last accepted time and state.
class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(const std::string& what, double t, Vector state)
        : std::runtime_error(what), t_(t), state_(std::move(state)) {}

    [[nodiscard]] double time() const noexcept { return t_; }
    [[nodiscard]] const Vector& state() const noexcept { return state_; }

private:
    double t_;
    Vector state_;
};

}  // namespace linrk
