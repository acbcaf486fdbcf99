#include "linrk/stability.hpp"

#include "linrk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace linrk {

namespace {

constexpr double kPoleTol = 1e-14;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Matrix stage_sum(const RowTableau& t) { return t.alpha + t.gamma; }

void check_row(const RowTableau& t) {
    const Index s = t.stages();
    if (s < 1 || t.alpha.rows() != s || t.alpha.cols() != s || t.gamma.rows() != s ||
        t.gamma.cols() != s) {
        throw ArgumentError("stability: tableau dimensions are inconsistent");
    }
}

/// z b^T (I - z(A+G))^-1 1, or nullopt within pole_tol of a pole.
std::optional<Complex> row_increment(const RowTableau& t, Complex z, double pole_tol) {
    check_row(t);
    const Matrix m = stage_sum(t);
    const Index s = t.stages();
    std::vector<Complex> w(static_cast<std::size_t>(s));
    Complex acc = 0.0;
    for (Index i = 0; i < s; ++i) {
        const Complex d = 1.0 - z * m(i, i);
        if (std::abs(d) <= pole_tol) return std::nullopt;
        Complex r = 1.0;
        for (Index j = 0; j < i; ++j) r += z * m(i, j) * w[static_cast<std::size_t>(j)];
        w[static_cast<std::size_t>(i)] = r / d;
        acc += t.b(i) * w[static_cast<std::size_t>(i)];
    }
    return z * acc;
}

std::optional<Complex> increment(const StabilityKind& kind, Complex z, double pole_tol) {
    return std::visit(
        overloaded{
            [&](const RowTableau& t) { return row_increment(t, z, pole_tol); },
            [&](const CrankNicolson&) -> std::optional<Complex> {
                const Complex d = 1.0 - z / 2.0;
                if (std::abs(d) <= pole_tol) return std::nullopt;
                return z / d;
            },
            [&](const ExplicitRkPolynomial& p) -> std::optional<Complex> {
                Complex term = 1.0;
                Complex sum = 0.0;
                for (int k = 1; k <= p.order; ++k) {
                    term *= z / static_cast<double>(k);
                    sum += term;
                }
                Complex zp = std::pow(z, p.order + 1);
                for (double c : p.extra) {
                    sum += c * zp;
                    zp *= z;
                }
                return sum;
            },
        },
        kind);
}

Complex evaluate_or_throw(const StabilityKind& kind, Complex z) {
    auto inc = increment(kind, z, 0.0);
    if (!inc) throw ArgumentError("stability_function: z is a pole");
    return *inc;
}

}  // namespace

Complex stability_increment(const StabilityKind& kind, Complex z) { return evaluate_or_throw(kind, z); }

Complex stability_function(const StabilityKind& kind, Complex z) {
    return 1.0 + evaluate_or_throw(kind, z);
}

bool is_infinite(Complex v) noexcept { return std::isinf(v.real()) || std::isinf(v.imag()); }

Complex r_infinity(const StabilityKind& kind) {
    return std::visit(
        overloaded{
            [](const RowTableau& t) -> Complex {
                check_row(t);
                const Matrix m = stage_sum(t);
                const Index s = t.stages();
                Vector w(s);
                for (Index i = 0; i < s; ++i) {
                    if (m(i, i) == 0.0) throw ArgumentError("r_infinity: alpha + gamma is singular");
                    double r = 1.0;
                    for (Index j = 0; j < i; ++j) r -= m(i, j) * w(j);
                    w(i) = r / m(i, i);
                }
                return 1.0 - t.b.dot(w);
            },
            [](const CrankNicolson&) -> Complex { return -1.0; },
            [](const ExplicitRkPolynomial&) -> Complex {
                return {std::numeric_limits<double>::infinity(), 0.0};
            },
        },
        kind);
}

std::vector<Complex> poles(const StabilityKind& kind) {
    return std::visit(overloaded{
                          [](const RowTableau& t) {
                              std::vector<Complex> out;
                              for (Index i = 0; i < t.gamma.rows(); ++i) {
                                  const double g = t.alpha(i, i) + t.gamma(i, i);
                                  if (g == 0.0) continue;
                                  const Complex p = 1.0 / g;
                                  if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
                              }
                              return out;
                          },
                          [](const CrankNicolson&) { return std::vector<Complex>{2.0}; },
                          [](const ExplicitRkPolynomial&) { return std::vector<Complex>{}; },
                      },
                      kind);
}

namespace {

std::vector<double> radii(const ScanOptions& scan) {
    std::vector<double> r;
    const int n = std::max(scan.n_radii, 2);
    const double l0 = std::log10(scan.r_min);
    const double l1 = std::log10(scan.r_max);
    r.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) r.push_back(std::pow(10.0, l0 + (l1 - l0) * k / (n - 1)));
    return r;
}

bool bounded_at(const StabilityKind& kind, Complex z, double tol) {
    auto inc = increment(kind, z, kPoleTol);
    if (!inc) return false;
    return std::abs(1.0 + *inc) <= 1.0 + tol;
}

/// |R| <= 1 + tol along z = r e^{i(pi - theta)}, including the limit.
bool ray_bounded(const StabilityKind& kind, double theta_deg, const std::vector<double>& rs,
                 double r_inf_abs, double tol) {
    if (!(r_inf_abs <= 1.0 + tol)) return false;
    const double phi = std::numbers::pi - theta_deg * std::numbers::pi / 180.0;
    const Complex dir = std::polar(1.0, phi);
    for (double r : rs) {
        if (!bounded_at(kind, r * dir, tol)) return false;
    }
    return true;
}

/// Every ray in [0, theta] on the sampled radii.
bool sector_bounded(const StabilityKind& kind, double theta_deg, const std::vector<double>& rs,
                    double r_inf_abs, const ScanOptions& scan) {
    const int n = std::max(scan.n_rays, 1);
    for (int k = 0; k <= n; ++k) {
        if (!ray_bounded(kind, theta_deg * k / n, rs, r_inf_abs, scan.tol)) return false;
    }
    return true;
}

}  // namespace

StabilityReport classify(const StabilityKind& kind, const ScanOptions& scan) {
    if (scan.n_rays < 1 || scan.n_radii < 2 || !(scan.r_min > 0.0) || !(scan.r_max > scan.r_min) ||
        !(scan.tol >= 0.0) || !(scan.angle_tol > 0.0)) {
        throw ArgumentError("classify: scan parameters must be positive");
    }
    StabilityReport rep;
    rep.scan = scan;
    rep.r_infinity = r_infinity(kind);
    const double rinf = is_infinite(rep.r_infinity) ? std::numeric_limits<double>::infinity()
                                                    : std::abs(rep.r_infinity);
    const auto rs = radii(scan);

    bool axis_ok = bounded_at(kind, 0.0, scan.tol);
    for (double y : rs) {
        if (!axis_ok) break;
        axis_ok = bounded_at(kind, Complex(0.0, y), scan.tol) &&
                  bounded_at(kind, Complex(0.0, -y), scan.tol);
    }
    bool poles_ok = true;
    for (const Complex& p : poles(kind)) poles_ok = poles_ok && p.real() > 0.0;

    rep.a_stable = axis_ok && poles_ok && rinf <= 1.0 + scan.tol;
    rep.l_stable = rep.a_stable && rinf <= 1e-10;

    if (rep.a_stable) {
        rep.alpha_deg = 90.0;
    } else if (!ray_bounded(kind, 0.0, rs, rinf, scan.tol)) {
        rep.alpha_deg = 0.0;
    } else if (sector_bounded(kind, 90.0, rs, rinf, scan)) {
        rep.alpha_deg = 90.0;
    } else {
        double lo = 0.0;
        double hi = 90.0;
        while (hi - lo > scan.angle_tol) {
            const double mid = 0.5 * (lo + hi);
            if (sector_bounded(kind, mid, rs, rinf, scan)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        rep.alpha_deg = lo;
    }
    return rep;
}

std::vector<RegionSample> region_scan(const StabilityKind& kind, const RegionGrid& grid) {
    if (grid.nx < 2 || grid.ny < 2) throw ArgumentError("region_scan: nx and ny must be at least 2");
    std::vector<RegionSample> out;
    out.reserve(static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny));
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double im = grid.im_min + (grid.im_max - grid.im_min) * iy / (grid.ny - 1);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double re = grid.re_min + (grid.re_max - grid.re_min) * ix / (grid.nx - 1);
            auto inc = increment(kind, Complex(re, im), kPoleTol);
            const double a = inc ? std::abs(1.0 + *inc) : std::numeric_limits<double>::infinity();
            out.push_back({re, im, a});
        }
    }
    return out;
}

std::vector<TwoStageThirdOrderMember> two_stage_third_order_family() {
    std::vector<TwoStageThirdOrderMember> out;
    for (double sign : {1.0, -1.0}) {
        const double g = (3.0 + sign * std::sqrt(3.0)) / 6.0;
        // b2 alpha21^2 = 1/3 and b2 beta21 = 1/2 - gamma.
        const double a21 = 2.0 / 3.0;
        const double b2 = 0.75;
        const double beta21 = (0.5 - g) / b2;
        RowTableau t;
        t.name = sign > 0 ? "ROS3-2A" : "ROS3-2B";
        t.alpha = Matrix::Zero(2, 2);
        t.alpha(1, 0) = a21;
        t.gamma = Matrix::Zero(2, 2);
        t.gamma << g, 0.0, beta21 - a21, g;
        t.b = Vector(2);
        t.b << 1.0 - b2, b2;
        t.order = 3;
        const double rinf = r_infinity(t).real();
        out.push_back({g, std::move(t), rinf});
    }
    return out;
}

}  // namespace linrk
