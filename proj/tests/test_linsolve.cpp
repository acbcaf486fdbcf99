#include "support.hpp"

#include <gtest/gtest.h>

namespace linrk {
namespace {

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Index>(v.size()));
    Index i = 0;
    for (double e : v) x(i++) = e;
    return x;
}

TEST(Factor, IdentitySolvesExactly) {
    const auto f = factor(Matrix::Identity(2, 2));
    EXPECT_EQ(solve(f, vec({3.0, 4.0})), vec({3.0, 4.0}));
}

TEST(Factor, Diagonal) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    EXPECT_EQ(solve(factor(d), vec({2.0, 4.0})), vec({1.0, 1.0}));
}

TEST(Factor, ZeroMatrixIsSingular) {
    try {
        (void)factor(Matrix::Zero(2, 2));
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_EQ(e.pivot(), 0);
    }
    Matrix m(3, 3);
    m << 1, 2, 3, 2, 4, 6, 0, 0, 1;
    try {
        (void)factor(m);
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_EQ(e.pivot(), 1);
    }
}

TEST(Factor, PivotsOnZeroDiagonal) {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    const auto f = factor(m);
    EXPECT_EQ(f.pivots()[0], 1);
    EXPECT_EQ(solve(f, vec({5.0, 7.0})), vec({7.0, 5.0}));
}

TEST(Factor, RejectsBadInput) {
    EXPECT_THROW((void)factor(Matrix::Zero(2, 3)), ArgumentError);
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = std::nan("");
    EXPECT_THROW((void)factor(m), ArgumentError);
    EXPECT_THROW((void)solve(factor(Matrix::Identity(2, 2)), Vector::Ones(3)), ArgumentError);
}

TEST(Factor, RandomWellConditionedResidual) {
    std::mt19937 rng(42);
    std::normal_distribution<double> nd;
    Matrix m(50, 50);
    for (Index i = 0; i < 50; ++i) {
        for (Index j = 0; j < 50; ++j) m(i, j) = nd(rng);
    }
    m += 10.0 * Matrix::Identity(50, 50);
    Vector rhs(50);
    for (Index i = 0; i < 50; ++i) rhs(i) = nd(rng);
    const auto f = factor(m);
    const Vector x = solve(f, rhs);
    EXPECT_LE((m * x - rhs).norm() / rhs.norm(), 1e-10);
    EXPECT_LE(relative_residual(m, x, rhs), 1e-14);
    // Independent oracle.
    const Vector y = m.partialPivLu().solve(rhs);
    EXPECT_LE((x - y).norm() / y.norm(), 1e-12);
}

TEST(Factor, PackedFactorsReconstructMatrix) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Matrix m(6, 6);
    for (Index i = 0; i < 6; ++i) {
        for (Index j = 0; j < 6; ++j) m(i, j) = ud(rng);
    }
    const auto f = factor(m);
    const Matrix& p = f.packed();
    Matrix l = p.triangularView<Eigen::StrictlyLower>();
    l.diagonal().setOnes();
    const Matrix u = p.triangularView<Eigen::Upper>();
    Matrix pa = m;
    for (Index k = 0; k < 6; ++k) pa.row(k).swap(pa.row(f.pivots()[static_cast<std::size_t>(k)]));
    EXPECT_LE((l * u - pa).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(f.original(), m);
}

TEST(StageMatrix, Forms) {
    const Matrix t = heat1d_matrix(4, 1.0);
    const Matrix a = stage_matrix(t, 0.1, StageForm::scaled_identity);
    const Matrix b = stage_matrix(t, 0.1, StageForm::shifted_jacobian);
    EXPECT_LE((a - (Matrix::Identity(4, 4) - 0.1 * t)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((b - (Matrix::Identity(4, 4) / 0.1 - t)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW((void)stage_matrix(t, 0.0, StageForm::scaled_identity), ArgumentError);
}

TEST(StageMatrix, HeatSolveResidual) {
    const Matrix a = heat1d_matrix(20, 1.0);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Vector rhs(20);
    for (Index i = 0; i < 20; ++i) rhs(i) = ud(rng);
    for (double hg : {1e-3, 0.29, 10.0}) {
        const Matrix m = stage_matrix(a, hg, StageForm::shifted_jacobian);
        const Vector x = solve(factor(m), rhs);
        EXPECT_LE((m * x - rhs).norm() / rhs.norm(), 1e-10);
    }
}

TEST(StageSolver, ReusesOnlyOnMatchingKey) {
    const Matrix t = heat1d_matrix(5, 1.0);
    const Vector rhs = Vector::Ones(5);
    StageSolver solver;
    const auto s1 = next_jacobian_stamp();
    (void)solver.solve(t, s1, 0.1, StageForm::shifted_jacobian, rhs);
    (void)solver.solve(t, s1, 0.1, StageForm::shifted_jacobian, rhs);
    EXPECT_EQ(solver.factorizations(), 1u);
    (void)solver.solve(t, s1, 0.2, StageForm::shifted_jacobian, rhs);
    EXPECT_EQ(solver.factorizations(), 2u);
    (void)solver.solve(t, s1, 0.1, StageForm::scaled_identity, rhs);
    EXPECT_EQ(solver.factorizations(), 3u);
    const auto s2 = next_jacobian_stamp();
    (void)solver.solve(t, s2, 0.1, StageForm::shifted_jacobian, rhs);
    EXPECT_EQ(solver.factorizations(), 4u);
    (void)solver.solve(t, 0, 0.1, StageForm::shifted_jacobian, rhs);
    (void)solver.solve(t, 0, 0.1, StageForm::shifted_jacobian, rhs);
    EXPECT_EQ(solver.factorizations(), 6u);
    EXPECT_EQ(solver.solves(), 7u);

    const auto& f = solver.get(t, s2, 0.1, StageForm::shifted_jacobian);
    EXPECT_EQ(f.jacobian_stamp, s2);
    EXPECT_EQ(f.h_gamma, 0.1);
}

TEST(StageSolver, SingularStageMatrixPropagates) {
    StageSolver solver;
    const Matrix t = Matrix::Identity(2, 2);
    EXPECT_THROW((void)solver.solve(t, next_jacobian_stamp(), 1.0, StageForm::shifted_jacobian,
                                    Vector::Ones(2)),
                 SingularMatrixError);
}

TEST(StageSolver, ResidualFailureIsStepError) {
    // Ill-conditioned Hilbert matrix whose solve cannot meet a zero tolerance.
    StageSolver solver(0.0);
    Matrix t(12, 12);
    for (Index i = 0; i < 12; ++i) {
        for (Index j = 0; j < 12; ++j) t(i, j) = 1.0 / static_cast<double>(i + j + 1);
    }
    const Vector rhs = Vector::LinSpaced(12, -1.0, 1.0);
    EXPECT_THROW((void)solver.solve(t, next_jacobian_stamp(), 1e300, StageForm::shifted_jacobian, rhs),
                 StepError);
    EXPECT_EQ(solver.factorizations(), 2u);
}

}  // namespace
}  // namespace linrk
