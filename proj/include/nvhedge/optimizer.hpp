#pragma once

#include "nvhedge/hedging.hpp"
#include "nvhedge/newsvendor.hpp"
#include "nvhedge/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace nvhedge {

/// Newsvendor solution under the risk-neutral distribution of A_T.
NvSolution risk_neutral_newsvendor(const EmpiricalDist& dist_m, const DemandParams& demand);

struct OptimizerOptions {
    int r_grid = 17;           // coarse scan of [bc, R^NV(M)] before the golden-section refinement
    double r_tol_rel = 1e-5;   // final R bracket, relative to R^NV(M)
    double p_tol_rel = 1e-9;   // final P bracket, relative to c
    double tie_rel = 1e-9;     // objective values this close are ties
};

struct HedgeOptimum {
    double m = 0.0;
    Decision decision;
    double q = 0.0;
    VarianceBreakdown breakdown;
    double v0 = 0.0;
    double v0_se = 0.0;
    double production_share = 0.0; // v0 / m
    int evaluations = 0;           // unhedgeable-factor evaluations

    FrontierPoint frontier_point() const;
};

/// Minimizes B(m, P, R) for one HedgingModel. The unhedgeable factor depends on R only,
/// so evaluations are memoized and can be shared across targets through the cache.
class HedgeOptimizer {
public:
    explicit HedgeOptimizer(const HedgingModel& model, OptimizerOptions opts = {});

    const HedgingModel& model() const { return model_; }
    const NvSolution& nv_real() const { return nv_; }
    const NvSolution& nv_risk_neutral() const { return nvm_; }

    /// Upper end of the admissible price range at VPQ r: smallest root of V0(P, r) = m,
    /// or the V0-maximizing price when m is out of reach.
    double price_cap(double m, double r) const;

    /// Best price at fixed r and the resulting B.
    std::pair<double, double> best_price(double m, double r) const;

    HedgeOptimum minimize_B(double m) const;
    std::vector<HedgeOptimum> efficient_frontier(std::span<const double> m_grid) const;

    std::size_t cache_size() const { return cache_.size(); }

private:
    double unhedgeable_factor(double r) const;

    const HedgingModel& model_;
    OptimizerOptions opts_;
    NvSolution nv_;
    NvSolution nvm_;
    mutable std::map<double, MeanWithError> cache_;
};

/// Condition under which hedging cannot push the VPQ above the newsvendor level when the
/// asset price trend hurts demand.
struct HurtingCondition {
    double p_circ = 0.0; // risk-neutral best price at R^NV
    double r_ratio = 0.0; // (P_circ - s) / (P^NV - s)
    double lhs = 0.0;
    double rhs = 0.0;    // c - s
    bool satisfied = false;
};

HurtingCondition hurting_condition(const EmpiricalDist& dist_m, const NvSolution& nv, const DemandParams& demand);

/// VPQ bound R_circ used when the hurting condition fails. Throws NotApplicable otherwise.
double compute_r_circ(const EmpiricalDist& dist_m, const NvSolution& nv, const DemandParams& demand);

/// E^M[A 1{A <= R}] / P^M(A >= R).
double r_circ_lhs(const EmpiricalDist& dist_m, double r);

struct BoundCheck {
    const char* name = "";
    bool passed = false;
    double value = 0.0;
    double bound = 0.0;
};

struct BoundsReport {
    Impact impact = Impact::Inconclusive;
    double m = 0.0;
    double p_nv = 0.0, r_nv = 0.0;
    double p_nvm = 0.0, r_nvm = 0.0;
    double p_h = 0.0, r_h = 0.0;
    double v0_h = 0.0, v0_h_se = 0.0;
    std::optional<HurtingCondition> hurt;
    std::optional<double> r_circ;
    std::vector<BoundCheck> checks;

    bool all_passed() const;
};

/// Evaluates the structural bounds at a hedging optimum. r_tol is the VPQ search resolution.
BoundsReport check_bounds(const HedgeOptimizer& opt, const HedgeOptimum& h, Impact impact, double r_tol);

} // namespace nvhedge
