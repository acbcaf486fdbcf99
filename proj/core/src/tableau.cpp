#include "linrk/tableau.hpp"

#include "linrk/errors.hpp"

#include <cmath>
#include <sstream>

namespace linrk {

namespace {

std::string entry_name(const char* matrix, Index i, Index j) {
    std::ostringstream os;
    os << matrix << '[' << i << "][" << j << ']';
    return os.str();
}

void check_square(std::vector<std::string>& issues, const Matrix& m, Index s, const char* name) {
    if (m.rows() != s || m.cols() != s) {
        std::ostringstream os;
        os << name << " is " << m.rows() << 'x' << m.cols() << ", expected " << s << 'x' << s;
        issues.push_back(os.str());
    }
}

void check_strictly_lower(std::vector<std::string>& issues, const Matrix& m, const char* name) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = i; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) {
                issues.push_back(entry_name(name, i, j) + " must be zero (strictly lower triangular)");
            }
        }
    }
}

void check_finite(std::vector<std::string>& issues, const Matrix& m, const char* name) {
    if (!m.allFinite()) issues.push_back(std::string(name) + " has non-finite entries");
}

}  // namespace

bool is_strictly_lower(const Matrix& m, double tol) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = i; j < m.cols(); ++j) {
            if (std::abs(m(i, j)) > tol) return false;
        }
    }
    return true;
}

bool is_lower(const Matrix& m, double tol) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = i + 1; j < m.cols(); ++j) {
            if (std::abs(m(i, j)) > tol) return false;
        }
    }
    return true;
}

Matrix invert_lower(const Matrix& l) {
    const Index n = l.rows();
    Matrix inv = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        if (l(i, i) == 0.0) {
            throw StructuralError("lower triangular matrix has a zero diagonal entry at " +
                                  std::to_string(i));
        }
    }
    // column k of L^-1 solves L x = e_k
    for (Index k = 0; k < n; ++k) {
        inv(k, k) = 1.0 / l(k, k);
        for (Index i = k + 1; i < n; ++i) {
            double acc = 0.0;
            for (Index j = k; j < i; ++j) acc += l(i, j) * inv(j, k);
            inv(i, k) = -acc / l(i, i);
        }
    }
    return inv;
}

ValidationReport validate(const RowTableau& t) {
    ValidationReport r;
    const Index s = t.stages();
    if (s < 1) {
        r.issues.emplace_back("tableau has no stages");
        return r;
    }
    check_square(r.issues, t.alpha, s, "alpha");
    check_square(r.issues, t.gamma, s, "gamma");
    if (t.b_hat && t.b_hat->size() != s) r.issues.emplace_back("b_hat length differs from b");
    if (t.b_hat.has_value() != t.embedded_order.has_value()) {
        r.issues.emplace_back("embedded order must be given iff b_hat is present");
    }
    if (t.order < 1) r.issues.emplace_back("order must be >= 1");
    if (!r.issues.empty()) return r;

    check_finite(r.issues, t.alpha, "alpha");
    check_finite(r.issues, t.gamma, "gamma");
    if (!t.b.allFinite()) r.issues.emplace_back("b has non-finite entries");
    check_strictly_lower(r.issues, t.alpha, "alpha");
    for (Index i = 0; i < s; ++i) {
        for (Index j = i + 1; j < s; ++j) {
            if (t.gamma(i, j) != 0.0) {
                r.issues.push_back(entry_name("gamma", i, j) + " must be zero (lower triangular)");
            }
        }
        if (t.gamma(i, i) == 0.0) {
            r.issues.push_back(entry_name("gamma", i, i) + " is zero (diagonal must be nonzero)");
        }
    }

    r.single_gamma = true;
    for (Index i = 1; i < s; ++i) {
        if (t.gamma(i, i) != t.gamma(0, 0)) r.single_gamma = false;
    }

    // alpha_si + gamma_si = b_i and sum_j alpha_sj = 1, read literally
    const Index last = s - 1;
    bool sa = std::abs(t.alpha.row(last).sum() - 1.0) <= 1e-14;
    for (Index i = 0; i < s && sa; ++i) {
        sa = std::abs(t.alpha(last, i) + t.gamma(last, i) - t.b(i)) <= 1e-14;
    }
    r.stiffly_accurate = sa;
    return r;
}

ValidationReport validate(const TwoStepWTableau& t) {
    ValidationReport r;
    const Index s = t.stages();
    if (s < 1) {
        r.issues.emplace_back("tableau has no stages");
        return r;
    }
    check_square(r.issues, t.a_prev, s, "a_prev");
    check_square(r.issues, t.a_cur, s, "a_cur");
    check_square(r.issues, t.g_prev, s, "g_prev");
    check_square(r.issues, t.g_cur, s, "g_cur");
    if (t.v.size() != s) r.issues.emplace_back("v length differs from b");
    if (!(t.gamma > 0.0)) r.issues.emplace_back("gamma must be positive");
    if (!r.issues.empty()) return r;
    check_strictly_lower(r.issues, t.a_cur, "a_cur");
    check_strictly_lower(r.issues, t.g_cur, "g_cur");
    r.single_gamma = true;
    return r;
}

ValidationReport validate(const PeerTableau& t) {
    ValidationReport r;
    const Index s = t.stages();
    if (s < 1) {
        r.issues.emplace_back("tableau has no stages");
        return r;
    }
    check_square(r.issues, t.B, s, "B");
    check_square(r.issues, t.A, s, "A");
    check_square(r.issues, t.G, s, "G");
    if (!(t.gamma > 0.0)) r.issues.emplace_back("gamma must be positive");
    if (!r.issues.empty()) return r;
    check_strictly_lower(r.issues, t.G, "G");
    for (Index i = 0; i < s; ++i) {
        if (std::abs(t.B.row(i).sum() - 1.0) > 1e-12) {
            r.issues.push_back("row " + std::to_string(i) + " of B does not sum to 1");
        }
    }
    r.single_gamma = true;
    return r;
}

TransformedTableau transform(const RowTableau& t) {
    const auto report = validate(t);
    if (!report.valid()) throw StructuralError("cannot transform '" + t.name + "': " + report.issues.front());

    const Index s = t.stages();
    const Matrix gamma_inv = invert_lower(t.gamma);

    TransformedTableau out;
    out.name = t.name;
    out.order = t.order;
    out.embedded_order = t.embedded_order;
    out.gamma_diag = t.gamma.diagonal();
    out.a = t.alpha * gamma_inv;
    out.c = Matrix::Zero(s, s);
    for (Index i = 0; i < s; ++i) {
        for (Index j = 0; j < i; ++j) out.c(i, j) = -gamma_inv(i, j);
    }
    out.m = (t.b.transpose() * gamma_inv).transpose();
    if (t.b_hat) out.m_hat = Vector((t.b_hat->transpose() * gamma_inv).transpose());
    // products of strictly lower and lower matrices are strictly lower; drop roundoff
    out.a.triangularView<Eigen::Upper>().setZero();
    return out;
}

RowTableau inverse_transform(const TransformedTableau& t) {
    const Index s = t.stages();
    if (t.gamma_diag.size() != s || t.a.rows() != s || t.a.cols() != s || t.c.rows() != s ||
        t.c.cols() != s) {
        throw StructuralError("transformed tableau '" + t.name + "' has inconsistent sizes");
    }
    for (Index i = 0; i < s; ++i) {
        if (t.gamma_diag(i) == 0.0) throw StructuralError("gamma_diag has a zero entry");
    }

    Matrix gamma_inv = -t.c;
    for (Index i = 0; i < s; ++i) gamma_inv(i, i) += 1.0 / t.gamma_diag(i);
    if (!is_lower(gamma_inv)) throw StructuralError("reconstructed Gamma^-1 is not lower triangular");
    for (Index i = 0; i < s; ++i) {
        if (gamma_inv(i, i) == 0.0) {
            throw StructuralError("reconstructed Gamma^-1 is singular (zero diagonal at " +
                                  std::to_string(i) + ")");
        }
    }
    const Matrix gamma = invert_lower(gamma_inv);

    RowTableau out;
    out.name = t.name;
    out.order = t.order;
    out.embedded_order = t.embedded_order;
    out.gamma = gamma;
    out.gamma.triangularView<Eigen::StrictlyUpper>().setZero();
    for (Index i = 0; i < s; ++i) out.gamma(i, i) = t.gamma_diag(i);
    out.alpha = t.a * gamma;
    out.alpha.triangularView<Eigen::Upper>().setZero();
    out.b = (t.m.transpose() * gamma).transpose();
    if (t.m_hat) out.b_hat = Vector((t.m_hat->transpose() * gamma).transpose());
    return out;
}

Vector stage_nodes(const RowTableau& t) { return t.alpha.rowwise().sum(); }

Vector stage_gamma_sums(const RowTableau& t) { return t.gamma.rowwise().sum(); }

RowTableau one_step_reduction(const TwoStepWTableau& t) {
    RowTableau out;
    out.name = t.name + "/reduced";
    out.alpha = t.a_cur;
    out.gamma = t.g_cur;
    out.gamma.triangularView<Eigen::Upper>().setZero();
    out.gamma.diagonal().setConstant(t.gamma);
    out.b = t.b;
    // consistency of the reduced method is not implied by the two-step one
    out.order = 1;
    return out;
}

TwoStepWTableau embed_as_two_step(const RowTableau& t) {
    const auto report = validate(t);
    if (!report.valid()) throw StructuralError("cannot embed '" + t.name + "': " + report.issues.front());
    if (!report.single_gamma) throw StructuralError("embedding needs a single gamma on the diagonal");
    const Index s = t.stages();
    TwoStepWTableau out;
    out.name = t.name + "/two-step";
    out.gamma = t.gamma(0, 0);
    out.a_prev = Matrix::Zero(s, s);
    out.g_prev = Matrix::Zero(s, s);
    out.a_cur = t.alpha;
    out.g_cur = t.gamma;
    out.g_cur.diagonal().setZero();
    out.b = t.b;
    out.v = Vector::Zero(s);
    out.order = t.order;
    return out;
}

}  // namespace linrk
