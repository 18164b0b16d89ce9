#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nvhedge {

/// Exponential Ornstein-Uhlenbeck asset: X = exp(Y), dY = kappa (alpha - Y) dt + sigma dB.
struct EouParams {
    double kappa = 0.0;   // mean-reversion rate, 1/year
    double alpha = 0.0;   // long-run mean of log-price
    double sigma = 0.0;   // log-price volatility, 1/sqrt(year)
    double x0 = 0.0;      // initial price
    double horizon = 0.0; // selling period T, years

    void validate() const;
    /// kappa * T < pi/4; required by the closed-form hedging quantities.
    bool hedging_condition() const;
    double y0() const;
    /// exp(alpha + sigma^2 / (2 kappa)); infinite when kappa == 0.
    double long_run_mean() const;
};

/// Linear demand-rate model: A_T = int_0^T (mu0 + mu1 X_t) dt + sigma_tilde * Btilde_T, D = A_T - b P.
struct DemandParams {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double sigma_tilde = 0.0;
    double b = 0.0;
    double c = 0.0;
    double s = 0.0;

    void validate() const;
    double rate(double x) const { return mu0 + mu1 * x; }
};

struct PathGrid {
    int n_steps = 21;
    double dt = 1.0 / 252.0;

    static PathGrid for_horizon(double horizon, int n_steps);
    double horizon() const { return n_steps * dt; }
    double time(int j) const { return j * dt; }
    void validate() const;
    void validate_against(const EouParams& params) const;
};

enum class Measure { Real, RiskNeutral };

const char* to_string(Measure m) noexcept;

struct MarketScenario {
    Measure measure = Measure::Real;
    std::vector<double> x_path;     // asset price on the grid
    std::vector<double> y_path;     // log-price on the grid
    std::vector<double> a_path;     // cumulative financial demand C_t on the grid
    std::vector<double> noise_path; // sigma_tilde * Btilde_t on the grid (Brownian bridge to the terminal draw)
    std::vector<double> dB;         // asset Brownian increments per step
    double a_terminal = 0.0;        // A_T = C_T + sigma_tilde * Btilde_T

    /// Market size accumulated up to grid index j: C_t + sigma_tilde * Btilde_t.
    double market_size(std::size_t j) const { return a_path[j] + noise_path[j]; }
};

/// n scenarios, one RNG stream per scenario index. Real measure uses exact OU transitions;
/// risk-neutral uses X_t = x0 exp(-sigma^2 t / 2 + sigma B_t). C_t accumulates by trapezoid.
std::vector<MarketScenario> simulate_paths(const EouParams& params, const DemandParams& demand,
                                           const PathGrid& grid, std::size_t n, std::uint64_t seed,
                                           Measure measure, unsigned threads = 0);

/// Terminal quantities only. Bit-identical to the a_terminal / a_path.back() of simulate_paths
/// for the same arguments, without keeping the paths.
struct TerminalSamples {
    std::vector<double> market;    // A_T
    std::vector<double> financial; // C_T
};

TerminalSamples simulate_terminal(const EouParams& params, const DemandParams& demand,
                                  const PathGrid& grid, std::size_t n, std::uint64_t seed,
                                  Measure measure, unsigned threads = 0);

/// (kappa / sigma) (alpha + sigma^2 / (2 kappa) - log x); sigma / 2 when kappa == 0.
double market_price_of_risk(double x, const EouParams& params);

std::vector<double> terminal_market_samples(std::span<const MarketScenario> scenarios);

/// E[X_t] under the real measure.
double eou_mean(const EouParams& params, double t);

} // namespace nvhedge
