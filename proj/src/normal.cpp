#include "nvhedge/normal.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>

namespace nvhedge {

namespace {

// 20-point Gauss-Legendre is exact to rounding for the smooth Owen integrand on a <= 1.
const gsl_integration_glfixed_table* legendre() {
    static const std::unique_ptr<gsl_integration_glfixed_table, void (*)(gsl_integration_glfixed_table*)> table(
        gsl_integration_glfixed_table_alloc(20), gsl_integration_glfixed_table_free);
    return table.get();
}

} // namespace

double owens_t(double h, double a) {
    if (a == 0.0) return 0.0;
    double hh = 0.5 * h * h;
    gsl_function f{[](double x, void* p) {
                       double k = *static_cast<double*>(p);
                       return std::exp(-k * (1.0 + x * x)) / (1.0 + x * x);
                   },
                   &hh};
    return gsl_integration_glfixed(&f, 0.0, a, legendre()) / (2.0 * std::numbers::pi);
}

double norm_cdf2_equal(double h, double rho) {
    if (rho >= 1.0) return norm_cdf(h);
    return norm_cdf(h) - 2.0 * owens_t(h, std::sqrt((1.0 - rho) / (1.0 + rho)));
}

} // namespace nvhedge
