#pragma once

#include "linrk/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace linrk {

/// Coefficients of an s-stage one-step ROW/W method
///
///   (I - h*gamma_ii*T) K_i = h F(U_n + sum_{j<i} alpha_ij K_j) + h T sum_{j<i} gamma_ij K_j
///   U_{n+1} = U_n + sum_i b_i K_i
///
/// alpha is strictly lower triangular, gamma lower triangular with a
/// nonzero diagonal. Embedded weights share alpha and gamma.
struct RowTableau {
    std::string name;
    Matrix alpha;
    Matrix gamma;
    Vector b;
    std::optional<Vector> b_hat;
    int order = 1;
    std::optional<int> embedded_order;

    [[nodiscard]] Index stages() const noexcept { return b.size(); }
    [[nodiscard]] bool has_embedded() const noexcept { return b_hat.has_value(); }
};

/// Successively solvable form
///
///   (I/(h*gamma_ii) - T) S_i = F(U_n + sum_{j<i} a_ij S_j) + sum_{j<i} (c_ij/h) S_j
///   U_{n+1} = U_n + sum_i m_i S_i
///
/// with S_i = sum_{j<=i} gamma_ij K_j. Only the strict lower part of c is
/// stored; its diagonal vanishes by construction.
struct TransformedTableau {
    std::string name;
    Matrix a;
    Matrix c;
    Vector m;
    std::optional<Vector> m_hat;
    Vector gamma_diag;
    int order = 1;
    std::optional<int> embedded_order;

    [[nodiscard]] Index stages() const noexcept { return m.size(); }
};

/// s-stage two-step W-method. Stage values U_ni approximate derivatives.
///
///   Y_ni = U_n + h sum_j a_prev_ij U_{n-1,j} + h sum_{j<i} a_cur_ij U_nj
///   (I - gamma h T) U_ni = F(Y_ni) + h T sum_j g_prev_ij U_{n-1,j} + h T sum_{j<i} g_cur_ij U_nj
///   U_{n+1} = U_n + h sum_i (b_i U_ni + v_i U_{n-1,i})
struct TwoStepWTableau {
    std::string name;
    double gamma = 1.0;
    Matrix a_prev;
    Matrix a_cur;
    Matrix g_prev;
    Matrix g_cur;
    Vector b;
    Vector v;
    int order = 1;

    [[nodiscard]] Index stages() const noexcept { return b.size(); }
};

/// s-stage two-step Rosenbrock-Peer method. Stage values approximate the
/// solution at t_n + nodes_i*h; the last stage is the step result.
///
///   (I - gamma h T) U_ni = sum_j B_ij U_{n-1,j} + h sum_j A_ij (F(U_{n-1,j}) - T U_{n-1,j})
///                          + h T sum_{j<i} G_ij U_nj
struct PeerTableau {
    std::string name;
    double gamma = 1.0;
    Matrix B;
    Matrix A;
    Matrix G;
    /// Abscissae metadata, only used to build startup values.
    Vector nodes;
    int order = 1;

    [[nodiscard]] Index stages() const noexcept { return nodes.size(); }
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool stiffly_accurate = false;
    bool single_gamma = false;

    [[nodiscard]] bool valid() const noexcept { return issues.empty(); }
};

/// Structural findings for a one-step tableau. Never throws.
///
/// stiffly_accurate follows the literal pair of conditions
/// alpha_si + gamma_si = b_i for all i and sum_j alpha_sj = 1. For s = 1
/// the empty sum is 0, so the linearly implicit Euler tableau reports false.
[[nodiscard]] ValidationReport validate(const RowTableau& t);
[[nodiscard]] ValidationReport validate(const TwoStepWTableau& t);
[[nodiscard]] ValidationReport validate(const PeerTableau& t);

/// a = alpha*Gamma^-1, c = diag(1/gamma_ii) - Gamma^-1, m = b*Gamma^-1.
/// Throws StructuralError if t is not structurally valid.
[[nodiscard]] TransformedTableau transform(const RowTableau& t);

/// Inverse of transform(). Gamma^-1 is rebuilt as diag(1/gamma_ii) - c,
/// including any diagonal c carries; a singular reconstruction throws
/// StructuralError.
[[nodiscard]] RowTableau inverse_transform(const TransformedTableau& t);

/// Row sums of alpha (stage abscissae of the non-autonomous form).
[[nodiscard]] Vector stage_nodes(const RowTableau& t);

/// Row sums of gamma including the diagonal.
[[nodiscard]] Vector stage_gamma_sums(const RowTableau& t);

/// One-step ROW tableau obtained by zeroing a_prev, g_prev and v.
[[nodiscard]] RowTableau one_step_reduction(const TwoStepWTableau& t);

/// Two-step W tableau whose one-step reduction is t (zero a_prev, g_prev, v).
/// Requires a single gamma on t's diagonal.
[[nodiscard]] TwoStepWTableau embed_as_two_step(const RowTableau& t);

[[nodiscard]] bool is_strictly_lower(const Matrix& m, double tol = 0.0);
[[nodiscard]] bool is_lower(const Matrix& m, double tol = 0.0);

/// Inverse of a lower triangular matrix with nonzero diagonal by forward
/// substitution. Throws StructuralError on a zero diagonal entry.
[[nodiscard]] Matrix invert_lower(const Matrix& l);

}  // namespace linrk
