#pragma once

// Independent reference computations used by unit and acceptance tests.

#include "nvhedge/nested_mc.hpp"
#include "nvhedge/processes.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracles {

using F3 = std::array<double, 3>; // f0, f1, f2

// Right-hand side of the Riccati system satisfied by f0, f1, f2 in remaining time.
inline F3 riccati_rhs(const nvhedge::EouParams& p, const F3& f) {
    const double k = p.kappa, al = p.alpha, s2 = p.sigma * p.sigma;
    const double q = k * k / s2;
    const double shifted = al + s2 / (2.0 * k);
    F3 d;
    d[2] = 2.0 * k * f[2] + 2.0 * s2 * f[2] * f[2] + q;
    d[1] = k * (f[1] - 2.0 * (al + s2 / k) * f[2]) + 2.0 * s2 * f[2] * f[1] - 2.0 * q * shifted;
    d[0] = -k * (al + s2 / k) * f[1] + 0.5 * s2 * (f[1] * f[1] + 2.0 * f[2]) + q * shifted * shifted;
    return d;
}

// Classic RK4 from f(0) = 0; returns f at each of the n + 1 points tau_k = k * tau_max / n.
inline std::vector<F3> rk4_riccati(const nvhedge::EouParams& p, double tau_max, int n) {
    std::vector<F3> out(n + 1, F3{0, 0, 0});
    const double h = tau_max / n;
    auto axpy = [](const F3& a, double s, const F3& b) { return F3{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]}; };
    for (int i = 0; i < n; ++i) {
        const F3& f = out[i];
        F3 k1 = riccati_rhs(p, f);
        F3 k2 = riccati_rhs(p, axpy(f, h / 2, k1));
        F3 k3 = riccati_rhs(p, axpy(f, h / 2, k2));
        F3 k4 = riccati_rhs(p, axpy(f, h, k3));
        for (int c = 0; c < 3; ++c) out[i + 1][c] = f[c] + h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    }
    return out;
}

struct DensitySample {
    double z = 0.0;  // Z_T = dM/dP on F_T
    double x = 0.0;  // X_T under the real measure
};

// Real-measure Euler scheme on a fine grid for the log-price and the density process
// Z_t = exp(-int eta dB - 1/2 int eta^2 dt), with eta the EOU market price of risk.
inline std::vector<DensitySample> density_process(const nvhedge::EouParams& p, std::size_t n_paths, int steps,
                                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    const double dt = p.horizon / steps, sq = std::sqrt(dt);
    const double shifted = p.alpha + p.sigma * p.sigma / (2.0 * p.kappa);
    std::vector<DensitySample> out(n_paths);
    for (auto& s : out) {
        double y = std::log(p.x0), log_z = 0.0;
        for (int k = 0; k < steps; ++k) {
            double eta = p.kappa == 0.0 ? 0.5 * p.sigma : p.kappa / p.sigma * (shifted - y);
            double db = sq * z(rng);
            log_z += -eta * db - 0.5 * eta * eta * dt;
            y += p.kappa * (p.alpha - y) * dt + p.sigma * db;
        }
        s.z = std::exp(log_z);
        s.x = std::exp(y);
    }
    return out;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

template <class Range, class F>
MeanSe mean_se(const Range& r, F&& f) {
    double n = 0.0, sum = 0.0, sum_sq = 0.0;
    for (const auto& v : r) {
        double x = f(v);
        sum += x;
        sum_sq += x * x;
        n += 1.0;
    }
    double mean = sum / n;
    double var = (sum_sq - n * mean * mean) / (n - 1.0);
    return {mean, std::sqrt(std::max(0.0, var) / n)};
}

// P(X <= h, Y <= h) for a standard bivariate normal with correlation rho in [0, 1), by
// conditioning on the shared factor and integrating with the trapezoid rule on [-12, 12].
inline double bivariate_equal_cdf(double h, double rho, int n = 40001) {
    auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
    auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    const double lo = -12.0, hi = 12.0, dz = (hi - lo) / (n - 1);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        double z = lo + k * dz;
        double c = cdf((h - std::sqrt(rho) * z) / std::sqrt(1.0 - rho));
        sum += (k == 0 || k == n - 1 ? 0.5 : 1.0) * phi(z) * c * c;
    }
    return sum * dz;
}

// Plain estimate of U(R): the sampled noise state enters directly.
inline MeanSe plain_unhedgeable_factor(const nvhedge::NestedMcEngine& e, double r) {
    const auto& g = e.config().grid;
    const int n = g.n_steps;
    std::vector<double> per_path(e.n_outer());
    for (std::size_t i = 0; i < e.n_outer(); ++i) {
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            double q = e.service_probability(i, j, r);
            acc += (j == 0 || j == n ? 0.5 : 1.0) * g.dt * e.ratio(i, j) * q * q;
        }
        per_path[i] = acc;
    }
    return mean_se(per_path, [](double v) { return v; });
}

} // namespace oracles
