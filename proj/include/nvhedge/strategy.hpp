#pragma once

#include "nvhedge/hedging.hpp"
#include "nvhedge/nested_mc.hpp"
#include "nvhedge/types.hpp"

#include <cstdint>
#include <vector>

namespace nvhedge {

struct StrategyPath {
    std::vector<double> theta;  // holdings over [t_j, t_{j+1})
    std::vector<double> chi;    // cumulative hedging P&L on the grid
    std::vector<double> chi_rm; // risk-mitigation leg, -int xi dX
    std::vector<double> chi_iv; // investment leg
    std::vector<double> v_t;    // projected payoff E^M[H_T | F_t]
    double h_terminal = 0.0;    // H_T
    double b_terminal = 0.0;    // asset Brownian motion at T
    double terminal_wealth = 0.0;

    double hedged_production() const { return h_terminal + chi_rm.back(); }
};

struct StrategyEnsemble {
    Decision decision;
    double m = 0.0;
    double v0 = 0.0;
    double z0m = 0.0;
    double gamma_m = 0.0;
    std::vector<StrategyPath> paths;
};

/// Simulates the optimal hedge on every outer path of the engine with left-point
/// rebalancing on the grid. v0 and z0m fix gamma_m.
StrategyEnsemble simulate_strategy(const NestedMcEngine& engine, const Decision& d, double m, double v0, double z0m);

/// Builds an independent engine (seed domain separate from the variance functional's paths)
/// and simulates n_paths strategy paths.
StrategyEnsemble simulate_strategy(const HedgingModel& model, const Decision& d, double m, std::size_t n_paths);

struct Estimate {
    double value = 0.0;
    double standard_error = 0.0;
};

struct StrategyStats {
    Estimate mean_wealth;
    Estimate variance;        // sample variance of H_T + chi_T
    Estimate investment_sq;   // Var(chi_iv) + Cov(chi_iv, H^h)
    Estimate unhedgeable_sq;  // Var(H^h) + Cov(chi_iv, H^h)
    Estimate mean_investment; // E[chi_iv_T]
    Estimate mean_hedged;     // E[H^h]
    double corr_hedged_brownian = 0.0;
    bool inconsistent = false; // a squared-risk estimate is negative beyond 3 SE
};

StrategyStats decompose_risk(const StrategyEnsemble& ensemble);

struct NoHedgeDecomposition {
    Estimate financial_sq;   // Var(H_fin) + Cov(H_fin, H_u)
    Estimate unhedgeable_sq; // Var(H_u) + Cov(H_fin, H_u)
    Estimate payoff_variance; // sample Var(H_T) on the same paths
};

/// Splits H_T = V0 + int xi dX + int delta dBtilde along the engine's outer paths.
NoHedgeDecomposition risk_decomposition_no_hedge(const NestedMcEngine& engine, const Decision& d);

} // namespace nvhedge
