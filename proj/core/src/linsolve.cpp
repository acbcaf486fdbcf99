#include "linrk/linsolve.hpp"

#include "linrk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace linrk {

namespace {

constexpr std::size_t kMaxCached = 8;

}  // namespace

LuFactorization factor(const Matrix& m) {
    if (m.rows() != m.cols()) throw ArgumentError("factor: matrix is not square");
    if (!m.allFinite()) throw ArgumentError("factor: matrix has non-finite entries");
    const Index n = m.rows();
    LuFactorization f;
    f.original_ = m;
    f.lu_ = m;
    f.piv_.resize(static_cast<std::size_t>(n));
    Matrix& a = f.lu_;
    for (Index k = 0; k < n; ++k) {
        Index p = k;
        double best = std::abs(a(k, k));
        for (Index i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                p = i;
            }
        }
        f.piv_[static_cast<std::size_t>(k)] = p;
        if (best == 0.0) {
            throw SingularMatrixError("factor: zero pivot in column " + std::to_string(k), k);
        }
        if (p != k) a.row(k).swap(a.row(p));
        const double inv = 1.0 / a(k, k);
        for (Index i = k + 1; i < n; ++i) {
            a(i, k) *= inv;
            const double l = a(i, k);
            if (l == 0.0) continue;
            for (Index j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
        }
    }
    return f;
}

Vector LuFactorization::solve(const Vector& rhs) const {
    const Index n = dim();
    if (rhs.size() != n) {
        throw ArgumentError("solve: rhs has length " + std::to_string(rhs.size()) + ", expected " +
                            std::to_string(n));
    }
    Vector x = rhs;
    for (Index k = 0; k < n; ++k) {
        const Index p = piv_[static_cast<std::size_t>(k)];
        if (p != k) std::swap(x(k), x(p));
    }
    for (Index i = 1; i < n; ++i) {
        double s = x(i);
        for (Index j = 0; j < i; ++j) s -= lu_(i, j) * x(j);
        x(i) = s;
    }
    for (Index i = n - 1; i >= 0; --i) {
        double s = x(i);
        for (Index j = i + 1; j < n; ++j) s -= lu_(i, j) * x(j);
        x(i) = s / lu_(i, i);
    }
    return x;
}

Vector solve(const LuFactorization& f, const Vector& rhs) { return f.solve(rhs); }

double relative_residual(const Matrix& m, const Vector& x, const Vector& rhs) {
    const double r = (m * x - rhs).lpNorm<Eigen::Infinity>();
    const double norm_m = m.rowwise().lpNorm<1>().maxCoeff();
    const double denom = norm_m * x.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();
    if (denom == 0.0) return r;
    return r / denom;
}

Matrix stage_matrix(const Matrix& T, double h_gamma, StageForm form) {
    if (T.rows() != T.cols()) throw ArgumentError("stage_matrix: T is not square");
    if (!(h_gamma != 0.0) || !std::isfinite(h_gamma)) {
        throw ArgumentError("stage_matrix: h*gamma must be finite and nonzero");
    }
    const Index n = T.rows();
    if (form == StageForm::scaled_identity) return Matrix::Identity(n, n) - h_gamma * T;
    return Matrix::Identity(n, n) / h_gamma - T;
}

StageMatrixFactorization& StageSolver::build(const Matrix& T, std::uint64_t stamp,
                                             double h_gamma, StageForm form) {
    StageMatrixFactorization entry{factor(stage_matrix(T, h_gamma, form)), h_gamma, stamp, form};
    ++factorizations_;
    std::erase_if(cache_, [&](const StageMatrixFactorization& e) {
        return e.jacobian_stamp != stamp ||
               (e.h_gamma == h_gamma && e.form == form);
    });
    if (cache_.size() >= kMaxCached) cache_.erase(cache_.begin());
    cache_.push_back(std::move(entry));
    return cache_.back();
}

const StageMatrixFactorization& StageSolver::get(const Matrix& T, std::uint64_t stamp,
                                                 double h_gamma, StageForm form) {
    if (stamp != 0) {
        for (const auto& e : cache_) {
            if (e.jacobian_stamp == stamp && e.h_gamma == h_gamma && e.form == form) return e;
        }
    }
    return build(T, stamp, h_gamma, form);
}

Vector StageSolver::solve(const Matrix& T, std::uint64_t stamp, double h_gamma, StageForm form,
                          const Vector& rhs) {
    ++solves_;
    const auto* f = &get(T, stamp, h_gamma, form);
    Vector x = f->factors.solve(rhs);
    if (relative_residual(f->factors.original(), x, rhs) <= residual_tol_) return x;

    f = &build(T, stamp, h_gamma, form);
    x = f->factors.solve(rhs);
    const double r = relative_residual(f->factors.original(), x, rhs);
    if (!(r <= residual_tol_)) {
        throw StepError("stage solve residual " + std::to_string(r) + " exceeds tolerance");
    }
    return x;
}

}  // namespace linrk
