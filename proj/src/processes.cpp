#include "nvhedge/processes.hpp"

#include "nvhedge/error.hpp"
#include "nvhedge/parallel.hpp"
#include "nvhedge/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nvhedge {

void EouParams::validate() const {
    require_finite(kappa, "kappa");
    require_finite(alpha, "alpha");
    require_finite(sigma, "sigma");
    require_finite(x0, "x0");
    require_finite(horizon, "horizon");
    require(kappa >= 0.0, "kappa must be >= 0");
    require(sigma > 0.0, "sigma must be > 0");
    require(x0 > 0.0, "x0 must be > 0");
    require(horizon > 0.0, "horizon must be > 0");
}

bool EouParams::hedging_condition() const { return kappa * horizon < std::numbers::pi / 4.0; }

double EouParams::y0() const { return std::log(x0); }

double EouParams::long_run_mean() const {
    if (kappa == 0.0) return std::numeric_limits<double>::infinity();
    return std::exp(alpha + sigma * sigma / (2.0 * kappa));
}

void DemandParams::validate() const {
    require_finite(mu0, "mu0");
    require_finite(mu1, "mu1");
    require_finite(sigma_tilde, "sigma_tilde");
    require_finite(b, "b");
    require_finite(c, "c");
    require_finite(s, "s");
    require(b > 0.0, "b must be > 0");
    require(sigma_tilde >= 0.0, "sigma_tilde must be >= 0");
    require(s >= 0.0, "s must be >= 0");
    require(c > s, "c must exceed s");
}

PathGrid PathGrid::for_horizon(double horizon, int n_steps) {
    require(n_steps >= 1, "grid needs at least one step");
    require(std::isfinite(horizon) && horizon > 0.0, "grid horizon must be > 0");
    return PathGrid{n_steps, horizon / n_steps};
}

void PathGrid::validate() const {
    require(n_steps >= 1, "grid needs at least one step");
    require(std::isfinite(dt) && dt > 0.0, "grid dt must be > 0");
}

void PathGrid::validate_against(const EouParams& params) const {
    validate();
    require(std::abs(horizon() - params.horizon) <= 1e-12 * params.horizon,
            "grid n_steps * dt must equal the horizon");
}

const char* to_string(Measure m) noexcept { return m == Measure::Real ? "real" : "risk_neutral"; }

namespace {

struct StepCoefficients {
    double decay;     // exp(-kappa dt)
    double log_drift; // risk-neutral log drift per step
    double vol;       // std of the log-price increment
    double sqrt_dt;
};

StepCoefficients step_coefficients(const EouParams& p, const PathGrid& g, Measure m) {
    StepCoefficients k{};
    k.sqrt_dt = std::sqrt(g.dt);
    if (m == Measure::Real) {
        k.decay = std::exp(-p.kappa * g.dt);
        double var = p.kappa == 0.0 ? p.sigma * p.sigma * g.dt
                                    : -p.sigma * p.sigma * std::expm1(-2.0 * p.kappa * g.dt) / (2.0 * p.kappa);
        k.vol = std::sqrt(var);
    } else {
        k.decay = 1.0;
        k.log_drift = -0.5 * p.sigma * p.sigma * g.dt;
        k.vol = p.sigma * k.sqrt_dt;
    }
    return k;
}

std::uint64_t domain_of(Measure m) {
    return static_cast<std::uint64_t>(m == Measure::Real ? StreamDomain::RealTerminal
                                                         : StreamDomain::RiskNeutralTerminal);
}

void check_inputs(const EouParams& p, const DemandParams& d, const PathGrid& g, std::size_t n) {
    p.validate();
    d.validate();
    g.validate_against(p);
    require(n >= 1, "scenario count must be >= 1");
}

// Walks one scenario: asset normals first, then the terminal demand-noise normal.
// The optional bridge normals come after, so the terminal values never depend on them.
template <class OnStep>
double walk(const EouParams& p, const DemandParams& d, const PathGrid& g, Measure m,
            const StepCoefficients& k, GaussianStream& rng, OnStep&& on_step, double& c_total) {
    double y = p.y0();
    double x = p.x0;
    double rate = d.rate(x);
    double c = 0.0;
    on_step(0, y, x, c, 0.0);
    for (int j = 0; j < g.n_steps; ++j) {
        double z = rng();
        if (m == Measure::Real)
            y = p.alpha + (y - p.alpha) * k.decay + k.vol * z;
        else
            y += k.log_drift + k.vol * z;
        x = std::exp(y);
        double next_rate = d.rate(x);
        c += 0.5 * (rate + next_rate) * g.dt;
        rate = next_rate;
        on_step(j + 1, y, x, c, z * k.sqrt_dt);
    }
    c_total = c;
    double w = rng();
    return d.sigma_tilde * std::sqrt(g.horizon()) * w;
}

} // namespace

std::vector<MarketScenario> simulate_paths(const EouParams& params, const DemandParams& demand,
                                           const PathGrid& grid, std::size_t n, std::uint64_t seed,
                                           Measure measure, unsigned threads) {
    check_inputs(params, demand, grid, n);
    const auto k = step_coefficients(params, grid, measure);
    const std::size_t points = static_cast<std::size_t>(grid.n_steps) + 1;
    std::vector<MarketScenario> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        GaussianStream rng(seed, {domain_of(measure), i});
        MarketScenario& s = out[i];
        s.measure = measure;
        s.x_path.resize(points);
        s.y_path.resize(points);
        s.a_path.resize(points);
        s.noise_path.assign(points, 0.0);
        s.dB.resize(static_cast<std::size_t>(grid.n_steps));
        double c_total = 0.0;
        double noise = walk(params, demand, grid, measure, k, rng,
                            [&](int j, double y, double x, double c, double db) {
                                s.y_path[j] = y;
                                s.x_path[j] = x;
                                s.a_path[j] = c;
                                if (j > 0) s.dB[j - 1] = db;
                            },
                            c_total);
        // Brownian bridge from the terminal draw back to zero at t = 0.
        s.noise_path[points - 1] = noise;
        for (std::size_t j = points - 2; j >= 1; --j) {
            double t = grid.time(static_cast<int>(j));
            double t_next = grid.time(static_cast<int>(j + 1));
            double mean = s.noise_path[j + 1] * t / t_next;
            double sd = demand.sigma_tilde * std::sqrt(t * (t_next - t) / t_next);
            s.noise_path[j] = mean + sd * rng();
        }
        s.a_terminal = c_total + noise;
    });
    return out;
}

TerminalSamples simulate_terminal(const EouParams& params, const DemandParams& demand,
                                  const PathGrid& grid, std::size_t n, std::uint64_t seed,
                                  Measure measure, unsigned threads) {
    check_inputs(params, demand, grid, n);
    const auto k = step_coefficients(params, grid, measure);
    TerminalSamples out;
    out.market.resize(n);
    out.financial.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
        GaussianStream rng(seed, {domain_of(measure), i});
        double c_total = 0.0;
        double noise = walk(params, demand, grid, measure, k, rng, [](int, double, double, double, double) {},
                            c_total);
        out.financial[i] = c_total;
        out.market[i] = c_total + noise;
    });
    return out;
}

double market_price_of_risk(double x, const EouParams& params) {
    require(std::isfinite(x) && x > 0.0, "price must be > 0");
    if (params.kappa == 0.0) return 0.5 * params.sigma;
    double s2 = params.sigma * params.sigma;
    return params.kappa / params.sigma * (params.alpha + s2 / (2.0 * params.kappa) - std::log(x));
}

std::vector<double> terminal_market_samples(std::span<const MarketScenario> scenarios) {
    require(!scenarios.empty(), "no scenarios");
    std::vector<double> out;
    out.reserve(scenarios.size());
    const Measure m = scenarios.front().measure;
    for (const auto& s : scenarios) {
        require(s.measure == m, "scenarios mix real and risk-neutral measures");
        out.push_back(s.a_terminal);
    }
    return out;
}

double eou_mean(const EouParams& p, double t) {
    double decay = std::exp(-p.kappa * t);
    double mean = p.alpha + (p.y0() - p.alpha) * decay;
    double var = p.kappa == 0.0 ? p.sigma * p.sigma * t
                                : -p.sigma * p.sigma * std::expm1(-2.0 * p.kappa * t) / (2.0 * p.kappa);
    return std::exp(mean + 0.5 * var);
}

} // namespace nvhedge
