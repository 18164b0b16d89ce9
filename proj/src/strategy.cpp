#include "nvhedge/strategy.hpp"

#include "nvhedge/error.hpp"
#include "nvhedge/newsvendor.hpp"
#include "nvhedge/parallel.hpp"
#include "nvhedge/random.hpp"

#include <cmath>

namespace nvhedge {

StrategyEnsemble simulate_strategy(const NestedMcEngine& engine, const Decision& d, double m, double v0,
                                   double z0m) {
    const auto& demand = engine.demand();
    validate_decision(d, demand);
    require_finite(m, "target return");
    StrategyEnsemble out;
    out.decision = d;
    out.m = m;
    out.v0 = v0;
    out.z0m = z0m;
    out.gamma_m = gamma_m(m, v0, z0m);

    const int n = engine.n_steps();
    const auto& grid = engine.config().grid;
    const auto& forms = engine.closed_forms();
    const double horizon = grid.horizon();
    out.paths.resize(engine.n_outer());
    parallel_for(engine.n_outer(), engine.config().threads, [&](std::size_t i) {
        const MarketScenario& sc = engine.outer(i);
        StrategyPath& path = out.paths[i];
        path.theta.assign(n, 0.0);
        path.chi.assign(n + 1, 0.0);
        path.chi_rm.assign(n + 1, 0.0);
        path.chi_iv.assign(n + 1, 0.0);
        path.v_t.assign(n + 1, 0.0);
        for (int j = 0; j < n; ++j) {
            const double x = sc.x_path[j];
            const double v = engine.projected_payoff(i, j, d);
            const double xi = engine.xi(i, j, d);
            const double iota =
                forms.investment_ratio(horizon - grid.time(j), sc.y_path[j]) / x * (out.gamma_m - v - path.chi[j]);
            const double dx = sc.x_path[j + 1] - x;
            path.v_t[j] = v;
            path.theta[j] = -xi + iota;
            path.chi_rm[j + 1] = path.chi_rm[j] - xi * dx;
            path.chi_iv[j + 1] = path.chi_iv[j] + iota * dx;
            path.chi[j + 1] = path.chi[j] + path.theta[j] * dx;
            path.b_terminal += sc.dB[j];
        }
        path.v_t[n] = engine.projected_payoff(i, n, d);
        path.h_terminal = path.v_t[n];
        path.terminal_wealth = path.h_terminal + path.chi[n];
    });
    return out;
}

StrategyEnsemble simulate_strategy(const HedgingModel& model, const Decision& d, double m, std::size_t n_paths) {
    NestedMcConfig cfg = model.config().mc;
    cfg.n_outer = n_paths;
    cfg.seed = stream_key(cfg.seed, {static_cast<std::uint64_t>(StreamDomain::Strategy)});
    NestedMcEngine engine(model.params(), model.demand(), cfg, n_paths >= 100 && cfg.n_inner >= 50);
    return simulate_strategy(engine, d, m, model.v0(d), model.z0m());
}

namespace {

Estimate mean_of(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// Sample covariance with a standard error from the spread of the centred products.
Estimate covariance(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ma += a[k];
        mb += b[k];
    }
    ma /= n;
    mb /= n;
    std::vector<double> prod(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) prod[k] = (a[k] - ma) * (b[k] - mb);
    Estimate e = mean_of(prod);
    e.value *= n / (n - 1.0);
    return e;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    double cab = covariance(a, b).value, caa = covariance(a, a).value, cbb = covariance(b, b).value;
    if (!(caa > 0.0) || !(cbb > 0.0)) return 0.0;
    return cab / std::sqrt(caa * cbb);
}

} // namespace

StrategyStats decompose_risk(const StrategyEnsemble& ensemble) {
    require(ensemble.paths.size() >= 2, "need at least two strategy paths");
    const std::size_t n = ensemble.paths.size();
    std::vector<double> wealth(n), iv(n), hedged(n), bt(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& p = ensemble.paths[k];
        wealth[k] = p.terminal_wealth;
        iv[k] = p.chi_iv.back();
        hedged[k] = p.hedged_production();
        bt[k] = p.b_terminal;
    }
    StrategyStats s;
    s.mean_wealth = mean_of(wealth);
    s.variance = covariance(wealth, wealth);
    // Var(iv) + Cov(iv, hh) = Cov(iv, iv + hh); likewise for the hedged production payoff.
    std::vector<double> total(n);
    for (std::size_t k = 0; k < n; ++k) total[k] = iv[k] + hedged[k];
    s.investment_sq = covariance(iv, total);
    s.unhedgeable_sq = covariance(hedged, total);
    s.mean_investment = mean_of(iv);
    s.mean_hedged = mean_of(hedged);
    s.corr_hedged_brownian = correlation(hedged, bt);
    s.inconsistent = s.investment_sq.value < -3.0 * s.investment_sq.standard_error ||
                     s.unhedgeable_sq.value < -3.0 * s.unhedgeable_sq.standard_error;
    return s;
}

NoHedgeDecomposition risk_decomposition_no_hedge(const NestedMcEngine& engine, const Decision& d) {
    const auto& demand = engine.demand();
    validate_decision(d, demand);
    const int n = engine.n_steps();
    const std::size_t paths = engine.n_outer();
    require(paths >= 2, "need at least two outer paths");
    std::vector<double> fin(paths), unh(paths), payoff(paths);
    parallel_for(paths, engine.config().threads, [&](std::size_t i) {
        const MarketScenario& sc = engine.outer(i);
        double f = 0.0, u = 0.0;
        for (int j = 0; j < n; ++j) {
            f += engine.xi(i, j, d) * (sc.x_path[j + 1] - sc.x_path[j]);
            if (demand.sigma_tilde > 0.0) {
                double db_tilde = (sc.noise_path[j + 1] - sc.noise_path[j]) / demand.sigma_tilde;
                u += engine.delta(i, j, d) * db_tilde;
            }
        }
        fin[i] = f;
        unh[i] = u;
        payoff[i] = engine.projected_payoff(i, n, d);
    });
    std::vector<double> total(paths);
    for (std::size_t k = 0; k < paths; ++k) total[k] = fin[k] + unh[k];
    NoHedgeDecomposition out;
    out.financial_sq = covariance(fin, total);
    out.unhedgeable_sq = covariance(unh, total);
    out.payoff_variance = covariance(payoff, payoff);
    return out;
}

} // namespace nvhedge
