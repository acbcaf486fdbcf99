#pragma once

#include "linrk/types.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace linrk {

/// Packed LU factors with row pivots, PA = LU, L unit lower triangular.
/// Immutable after construction; concurrent solves are safe.
class LuFactorization {
public:
    LuFactorization() = default;

    [[nodiscard]] Index dim() const noexcept { return lu_.rows(); }
    [[nodiscard]] const Matrix& packed() const noexcept { return lu_; }
    [[nodiscard]] const std::vector<Index>& pivots() const noexcept { return piv_; }
    /// The matrix that was factored, kept for residual checks.
    [[nodiscard]] const Matrix& original() const noexcept { return original_; }

    [[nodiscard]] Vector solve(const Vector& rhs) const;

private:
    friend LuFactorization factor(const Matrix& m);

    Matrix lu_;
    Matrix original_;
    std::vector<Index> piv_;
};

/// Partial-pivoting LU. Throws SingularMatrixError carrying the pivot index
/// when a column has only exact zeros at and below the diagonal, and
/// ArgumentError for non-square or non-finite input.
[[nodiscard]] LuFactorization factor(const Matrix& m);

/// Throws ArgumentError when rhs has the wrong length.
[[nodiscard]] Vector solve(const LuFactorization& f, const Vector& rhs);

/// ||m x - rhs||_inf / (||m||_inf ||x||_inf + ||rhs||_inf)
[[nodiscard]] double relative_residual(const Matrix& m, const Vector& x, const Vector& rhs);

/// Which stage matrix a factorization is built for.
enum class StageForm {
    /// I - h*gamma*T
    scaled_identity,
    /// I/(h*gamma) - T
    shifted_jacobian,
};

/// A factorization of a stage matrix together with the key it was built for.
struct StageMatrixFactorization {
    LuFactorization factors;
    double h_gamma = 0.0;
    std::uint64_t jacobian_stamp = 0;
    StageForm form = StageForm::shifted_jacobian;
};

[[nodiscard]] Matrix stage_matrix(const Matrix& T, double h_gamma, StageForm form);

/// Factorization cache for one integration run.
///
/// A cached factorization is reused iff h_gamma, jacobian_stamp and the form
/// all match; anything else triggers a new factorization. The counter is the
/// instrumentation hook for reuse checks. Stamp 0 is never cached.
class StageSolver {
public:
    explicit StageSolver(double residual_tol = 1e-9) : residual_tol_(residual_tol) {}

    [[nodiscard]] const StageMatrixFactorization& get(const Matrix& T, std::uint64_t stamp,
                                                      double h_gamma, StageForm form);

    /// Solves with the cached factorization and checks the residual. A failed
    /// check refactors once; a second failure throws StepError.
    [[nodiscard]] Vector solve(const Matrix& T, std::uint64_t stamp, double h_gamma,
                               StageForm form, const Vector& rhs);

    [[nodiscard]] std::size_t factorizations() const noexcept { return factorizations_; }
    [[nodiscard]] std::size_t solves() const noexcept { return solves_; }
    void clear() noexcept { cache_.clear(); }

private:
    StageMatrixFactorization& build(const Matrix& T, std::uint64_t stamp, double h_gamma,
                                    StageForm form);

    std::vector<StageMatrixFactorization> cache_;
    std::size_t factorizations_ = 0;
    std::size_t solves_ = 0;
    double residual_tol_;
};

}  // namespace linrk
