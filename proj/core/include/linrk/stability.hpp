#pragma once

#include "linrk/tableau.hpp"
#include "linrk/types.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace linrk {

/// R(z) = (1 + z/2)/(1 - z/2)
struct CrankNicolson {};

/// R(z) = 1 + z + ... + z^p/p! + sum_i extra[i] z^(p+1+i)
struct ExplicitRkPolynomial {
    int order = 4;
    std::vector<double> extra;
};

using StabilityKind = std::variant<RowTableau, CrankNicolson, ExplicitRkPolynomial>;

/// For rows: R(z) = 1 + z b^T (I - z(alpha + gamma))^-1 1 by forward
/// substitution. Throws ArgumentError at a pole.
[[nodiscard]] Complex stability_function(const StabilityKind& kind, Complex z);

/// R(z) - 1 without cancellation, for consistency checks near z = 0.
[[nodiscard]] Complex stability_increment(const StabilityKind& kind, Complex z);

/// Limit of R(z) as |z| -> infinity. Infinite (Re = +inf) for polynomials.
/// Throws ArgumentError when alpha + gamma is singular.
[[nodiscard]] Complex r_infinity(const StabilityKind& kind);

[[nodiscard]] bool is_infinite(Complex v) noexcept;

/// Pole locations z with R(z) undefined.
[[nodiscard]] std::vector<Complex> poles(const StabilityKind& kind);

struct ScanOptions {
    int n_rays = 16;
    int n_radii = 200;
    double r_min = 1e-4;
    double r_max = 1e8;
    /// Slack on |R| <= 1.
    double tol = 1e-10;
    /// Bisection width for the A(alpha) angle, degrees.
    double angle_tol = 0.1;
};

struct RegionSample {
    double re = 0.0;
    double im = 0.0;
    /// +inf at poles.
    double abs_r = 0.0;
};

struct StabilityReport {
    Complex r_infinity{};
    bool a_stable = false;
    bool l_stable = false;
    double alpha_deg = 0.0;
    /// Scan density used to certify the flags and angle.
    ScanOptions scan{};
    std::optional<std::vector<RegionSample>> samples;
};

/// A-stability by the maximum-modulus argument: |R| <= 1 + tol on the sampled
/// imaginary axis, every pole in the open right half plane, |R(inf)| <= 1 + tol.
/// L-stable additionally needs |R(inf)| <= 1e-10. The A(alpha) angle is
/// found by bisection over rays z = r e^{i(pi - theta)}.
[[nodiscard]] StabilityReport classify(const StabilityKind& kind, const ScanOptions& scan = {});

struct RegionGrid {
    double re_min = -4.0;
    double re_max = 4.0;
    double im_min = -4.0;
    double im_max = 4.0;
    int nx = 81;
    int ny = 81;
};

/// |R(z)| on an nx x ny grid, row-major in im then re. Throws ArgumentError
/// if nx or ny < 2.
[[nodiscard]] std::vector<RegionSample> region_scan(const StabilityKind& kind,
                                                    const RegionGrid& grid);

/// Member of the equal-gamma two-stage family whose stability function
/// matches e^z through z^3.
struct TwoStageThirdOrderMember {
    double gamma = 0.0;
    RowTableau tableau;
    double r_infinity = 0.0;
};

/// The two members: gamma solves gamma^2 - gamma + 1/6 = 0. Neither has
/// R(inf) = 0.
[[nodiscard]] std::vector<TwoStageThirdOrderMember> two_stage_third_order_family();

}  // namespace linrk
