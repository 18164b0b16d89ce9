#pragma once

#include <cmath>
#include <numbers>

namespace nvhedge {

inline double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double norm_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
}

// Upper tail 1 - Phi(x) without cancellation.
inline double norm_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

/// Owen's T(h, a) for 0 <= a <= 1.
double owens_t(double h, double a);

/// P(X <= h, Y <= h) for standard bivariate normal with correlation 0 <= rho <= 1.
double norm_cdf2_equal(double h, double rho);

} // namespace nvhedge
