#pragma once

#include "nvhedge/empirical.hpp"
#include "nvhedge/processes.hpp"
#include "nvhedge/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace nvhedge {

struct NvSolution {
    double p = 0.0;
    double r = 0.0;
    double q = 0.0;
    double profit = 0.0;
    int iterations = 0;
    bool used_bisection = false;

    Decision decision() const { return {p, r}; }
};

void validate_decision(const Decision& d, const DemandParams& demand);

/// (P - c)(R - bP) - (P - s) E[(R - A)^+].
double expected_profit(const EmpiricalDist& dist, const Decision& d, const DemandParams& demand);

/// (P - s)^2 Var[(R - A)^+].
double payoff_variance(const EmpiricalDist& dist, const Decision& d, const DemandParams& demand);

/// Standard error of the sample mean of H_T over the distribution's samples.
double expected_profit_se(const EmpiricalDist& dist, const Decision& d, const DemandParams& demand);

/// argmax_P E[H(P, R)] for fixed R: (E[min(R, A)] + bc) / (2b).
double best_price_for(const EmpiricalDist& dist, double r, const DemandParams& demand);

/// argmax_R E[H(P, R)] for fixed P: F^{-1}((P - c) / (P - s)).
double best_vpq_for(const EmpiricalDist& dist, double p, const DemandParams& demand);

struct NvOptions {
    double damping = 1.0;
    int max_iterations = 500;
    double tolerance = 1e-10; // relative fixed-point residual
};

/// Joint profit maximizer. Throws AssumptionViolated when no interior solution with
/// positive profit and positive quantity exists.
NvSolution solve_newsvendor(const EmpiricalDist& dist, const DemandParams& demand, const NvOptions& opts = {});

struct NoHedgeFrontierOptions {
    int price_grid = 201;
    double refine_tolerance = 1e-9; // relative, golden-section refinement around the best grid cell
};

/// Smallest R with E[H(P, R)] = m, or nullopt when max_R E[H(P, R)] < m.
std::optional<double> vpq_for_target(const EmpiricalDist& dist, double p, double m, const DemandParams& demand);

/// Minimum-variance frontier without hedging. Throws Infeasible when any m exceeds
/// the maximum expected profit.
std::vector<FrontierPoint> frontier_no_hedge(const EmpiricalDist& dist, const DemandParams& demand,
                                             std::span<const double> m_grid,
                                             const NoHedgeFrontierOptions& opts = {});

struct AssumptionCheck {
    std::string name;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct AssumptionReport {
    double mean = 0.0;
    double stddev = 0.0;
    double p0 = 0.0;      // P(A <= bc)
    double eps0 = 0.0;    // E[(-A)^+]
    double f_star = 0.0;  // max of the quadratic profit lower bound
    AssumptionCheck positive_profit;  // mu_A > (sigma_A + 2bc + sqrt(8b(c-s) sigma_A)) / 2
    AssumptionCheck small_shortfall;  // bc p0 + eps0 <= min(2b(c-s), 2 sqrt(b f*))
    bool all_passed() const { return positive_profit.passed && small_shortfall.passed; }
};

/// Sufficient conditions on primitives for a positive-profit interior newsvendor solution.
AssumptionReport check_assumptions(const EmpiricalDist& dist, const DemandParams& demand);

} // namespace nvhedge
