#include "nvhedge/nested_mc.hpp"

#include "nvhedge/error.hpp"
#include "nvhedge/normal.hpp"
#include "nvhedge/parallel.hpp"
#include "nvhedge/random.hpp"

#include <cmath>
#include <limits>

namespace nvhedge {

void NestedMcConfig::validate(bool production) const {
    grid.validate();
    require(n_outer >= 1 && n_inner >= 1, "nested Monte Carlo needs at least one outer and one inner path");
    if (production) {
        require(n_outer >= 100, "n_outer must be >= 100");
        require(n_inner >= 50, "n_inner must be >= 50");
    }
}

std::vector<double> inner_integrals(const EouParams& params, const PathGrid& grid, int j, std::size_t n,
                                    std::uint64_t stream) {
    require(j >= 0 && j <= grid.n_steps, "grid index out of range");
    std::vector<double> out(n, 0.0);
    const int steps = grid.n_steps - j;
    if (steps == 0) return out;
    const double drift = -0.5 * params.sigma * params.sigma * grid.dt;
    const double vol = params.sigma * std::sqrt(grid.dt);
    GaussianStream rng(stream);
    for (std::size_t k = 0; k < n; ++k) {
        double log_x = 0.0;
        double sum = 0.5;
        for (int l = 1; l <= steps; ++l) {
            log_x += drift + vol * rng();
            double x = std::exp(log_x);
            sum += l == steps ? 0.5 * x : x;
        }
        out[k] = sum * grid.dt;
    }
    return out;
}

namespace {

struct Conditional {
    double base;  // R - a - mu0 tau
    double slope; // mu1 x
    double scale; // sigma_tilde sqrt(tau)
};

Conditional conditional(const DemandParams& demand, const PathGrid& grid, ConditionalState st, double r) {
    require(st.j >= 0 && st.j <= grid.n_steps, "grid index out of range");
    double tau = grid.dt * (grid.n_steps - st.j);
    return {r - st.a - demand.mu0 * tau, demand.mu1 * st.x, demand.sigma_tilde * std::sqrt(tau)};
}

bool terminal(const PathGrid& grid, ConditionalState st) { return st.j == grid.n_steps; }

void check_integrals(std::span<const double> integrals) {
    require(!integrals.empty(), "inner integrals must be non-empty");
}

double cdf_at(double gap, double scale) {
    if (scale > 0.0) return norm_cdf(gap / scale);
    return gap >= 0.0 ? 1.0 : 0.0;
}

// E[(gap + scale Z)^+] for standard normal Z.
double call_value(double gap, double scale) {
    if (scale > 0.0) {
        double z = gap / scale;
        return gap * norm_cdf(z) + scale * norm_pdf(z);
    }
    return gap > 0.0 ? gap : 0.0;
}

} // namespace

double service_probability(const DemandParams& demand, const PathGrid& grid, ConditionalState st, double r,
                           std::span<const double> integrals) {
    if (terminal(grid, st)) return st.a <= r ? 1.0 : 0.0;
    check_integrals(integrals);
    Conditional c = conditional(demand, grid, st, r);
    double sum = 0.0;
    for (double ik : integrals) sum += cdf_at(c.base - c.slope * ik, c.scale);
    return sum / static_cast<double>(integrals.size());
}

double delta_t(const DemandParams& demand, const PathGrid& grid, ConditionalState st, const Decision& d,
               std::span<const double> integrals) {
    return demand.sigma_tilde * (d.p - demand.s) * service_probability(demand, grid, st, d.r, integrals);
}

double xi_t(const DemandParams& demand, const PathGrid& grid, ConditionalState st, const Decision& d,
            std::span<const double> integrals) {
    if (terminal(grid, st) || demand.mu1 == 0.0) return 0.0;
    check_integrals(integrals);
    Conditional c = conditional(demand, grid, st, d.r);
    double sum = 0.0;
    for (double ik : integrals) sum += cdf_at(c.base - c.slope * ik, c.scale) * ik;
    return (d.p - demand.s) * demand.mu1 * sum / static_cast<double>(integrals.size());
}

double projected_payoff(const DemandParams& demand, const PathGrid& grid, ConditionalState st, const Decision& d,
                        std::span<const double> integrals) {
    const double sure = (d.p - demand.c) * (d.r - demand.b * d.p);
    if (terminal(grid, st)) return sure - (d.p - demand.s) * std::max(d.r - st.a, 0.0);
    check_integrals(integrals);
    Conditional c = conditional(demand, grid, st, d.r);
    double sum = 0.0;
    for (double ik : integrals) sum += call_value(c.base - c.slope * ik, c.scale);
    return sure - (d.p - demand.s) * sum / static_cast<double>(integrals.size());
}

namespace {

constexpr std::uint64_t kStandaloneIndex = std::numeric_limits<std::uint64_t>::max();

std::vector<double> standalone_integrals(const EouParams& params, const NestedMcConfig& cfg, int j) {
    cfg.validate(false);
    return inner_integrals(params, cfg.grid, j, cfg.n_inner,
                           stream_key(cfg.seed, {static_cast<std::uint64_t>(StreamDomain::InnerPaths),
                                                 kStandaloneIndex, static_cast<std::uint64_t>(j)}));
}

} // namespace

double delta_t(const EouParams& params, const DemandParams& demand, const NestedMcConfig& cfg,
               ConditionalState state, const Decision& d) {
    return delta_t(demand, cfg.grid, state, d, standalone_integrals(params, cfg, state.j));
}

double xi_t(const EouParams& params, const DemandParams& demand, const NestedMcConfig& cfg, ConditionalState state,
            const Decision& d) {
    return xi_t(demand, cfg.grid, state, d, standalone_integrals(params, cfg, state.j));
}

NestedMcEngine::NestedMcEngine(const EouParams& params, const DemandParams& demand, const NestedMcConfig& cfg,
                               bool production)
    : params_(params), demand_(demand), cfg_(cfg), forms_(params) {
    cfg_.validate(production);
    demand_.validate();
    cfg_.grid.validate_against(params_);

    const std::uint64_t outer_seed = stream_key(cfg_.seed, {static_cast<std::uint64_t>(StreamDomain::OuterPaths)});
    outer_ = simulate_paths(params_, demand_, cfg_.grid, cfg_.n_outer, outer_seed, Measure::Real, cfg_.threads);

    const int n = cfg_.grid.n_steps;
    inner_offset_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int j = 0; j < n; ++j) inner_offset_[j + 1] = inner_offset_[j] + cfg_.n_inner;
    inner_per_path_ = inner_offset_[n];

    ratio_.assign(cfg_.n_outer * points(), 1.0);
    inner_.assign(cfg_.n_outer * inner_per_path_, 0.0);
    inner_mean_.assign(cfg_.n_outer * points(), 0.0);
    inner_var_.assign(cfg_.n_outer * points(), 0.0);
    parallel_for(cfg_.n_outer, cfg_.threads, [&](std::size_t i) {
        for (int j = 0; j <= n; ++j) ratio_[i * points() + j] = forms_.z_ratio(cfg_.grid.time(j), outer_[i].y_path[j]);
        for (int j = 0; j < n; ++j) {
            auto block = inner_integrals(params_, cfg_.grid, j, cfg_.n_inner,
                                         stream_key(cfg_.seed, {static_cast<std::uint64_t>(StreamDomain::InnerPaths),
                                                                i, static_cast<std::uint64_t>(j)}));
            std::copy(block.begin(), block.end(), inner_.begin() + static_cast<std::ptrdiff_t>(i * inner_per_path_ +
                                                                                               inner_offset_[j]));
            double mean = 0.0, var = 0.0;
            for (double v : block) mean += v;
            mean /= static_cast<double>(block.size());
            for (double v : block) var += (v - mean) * (v - mean);
            inner_mean_[i * points() + j] = mean;
            inner_var_[i * points() + j] = var / static_cast<double>(block.size());
        }
    });
}

ConditionalState NestedMcEngine::state(std::size_t i, int j) const {
    const MarketScenario& s = outer_[i];
    return {j, s.x_path[j], s.market_size(static_cast<std::size_t>(j))};
}

std::span<const double> NestedMcEngine::integrals(std::size_t i, int j) const {
    if (j >= n_steps()) return {};
    return {inner_.data() + i * inner_per_path_ + inner_offset_[j], cfg_.n_inner};
}

double NestedMcEngine::service_probability(std::size_t i, int j, double r) const {
    return nvhedge::service_probability(demand_, cfg_.grid, state(i, j), r, integrals(i, j));
}

double NestedMcEngine::delta(std::size_t i, int j, const Decision& d) const {
    return delta_t(demand_, cfg_.grid, state(i, j), d, integrals(i, j));
}

double NestedMcEngine::xi(std::size_t i, int j, const Decision& d) const {
    return xi_t(demand_, cfg_.grid, state(i, j), d, integrals(i, j));
}

double NestedMcEngine::projected_payoff(std::size_t i, int j, const Decision& d) const {
    return nvhedge::projected_payoff(demand_, cfg_.grid, state(i, j), d, integrals(i, j));
}

MeanWithError NestedMcEngine::unhedgeable_factor(double r) const {
    require_finite(r, "vpq");
    const int n = n_steps();
    const double dt = cfg_.grid.dt;
    const double noise_sq = demand_.sigma_tilde * demand_.sigma_tilde;
    std::vector<double> per_path(n_outer());
    parallel_for(n_outer(), cfg_.threads, [&](std::size_t i) {
        const MarketScenario& s = outer_[i];
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double w = (j == 0 || j == n) ? 0.5 * dt : dt;
            const double t = cfg_.grid.time(j), tau = dt * (n - j);
            const double q = service_probability(i, j, r);
            // proxy: A_T given F_t treated as normal with the inner mean and variance, noise state b
            const double slope = demand_.mu1 * s.x_path[j];
            const std::size_t k = i * points() + static_cast<std::size_t>(j);
            const double gap = r - s.a_path[j] - demand_.mu0 * tau - slope * inner_mean_[k];
            const double var_t = noise_sq * tau + slope * slope * inner_var_[k];
            const double b = s.noise_path[j];
            const double proxy = var_t > 0.0 ? norm_cdf((gap - b) / std::sqrt(var_t)) : (gap - b >= 0.0 ? 1.0 : 0.0);
            const double total = var_t + noise_sq * t;
            // E_b[proxy^2] with b ~ N(0, sigma_tilde^2 t)
            const double proxy_mean =
                total > 0.0 ? norm_cdf2_equal(gap / std::sqrt(total), noise_sq * t / total) : proxy * proxy;
            acc += w * ratio(i, j) * (q * q - proxy * proxy + proxy_mean);
        }
        per_path[i] = acc;
    });
    double sum = 0.0, sum_sq = 0.0;
    for (double g : per_path) {
        sum += g;
        sum_sq += g * g;
    }
    const double cnt = static_cast<double>(per_path.size());
    double mean = sum / cnt;
    double var = cnt > 1 ? std::max(0.0, (sum_sq - cnt * mean * mean) / (cnt - 1.0)) : 0.0;
    return {mean, std::sqrt(var / cnt)};
}

MeanWithError NestedMcEngine::unhedgeable_sq(const Decision& d) const {
    MeanWithError u = unhedgeable_factor(d.r);
    double scale = demand_.sigma_tilde * (d.p - demand_.s);
    scale *= scale;
    return {scale * u.value, scale * u.standard_error};
}

} // namespace nvhedge
