#include "nvhedge/hedging.hpp"

#include "nvhedge/error.hpp"
#include "nvhedge/newsvendor.hpp"

#include <cmath>

namespace nvhedge {

double v0(const EmpiricalDist& dist_m, const Decision& d, const DemandParams& demand) {
    return expected_profit(dist_m, d, demand);
}

double gamma_m(double m, double v0, double z0m) {
    require(z0m > 1.0, "Z0M must exceed 1");
    return (m * z0m - v0) / (z0m - 1.0);
}

HedgingModel::HedgingModel(const EouParams& params, const DemandParams& demand, const HedgingConfig& cfg,
                           bool production)
    : cfg_(cfg), engine_(params, demand, cfg.mc, production) {
    require(cfg_.n_terminal >= 1, "n_terminal must be >= 1");
    const auto& g = cfg_.mc.grid;
    real_ = EmpiricalDist(
        simulate_terminal(params, demand, g, cfg_.n_terminal, cfg_.mc.seed, Measure::Real, cfg_.mc.threads).market);
    rn_ = EmpiricalDist(simulate_terminal(params, demand, g, cfg_.n_terminal, cfg_.mc.seed, Measure::RiskNeutral,
                                          cfg_.mc.threads)
                            .market);
    z0m_ = engine_.closed_forms().z0m();
}

double HedgingModel::v0(const Decision& d) const { return nvhedge::v0(rn_, d, demand()); }

double HedgingModel::v0_se(const Decision& d) const { return expected_profit_se(rn_, d, demand()); }

double HedgingModel::investment_sq(double m, const Decision& d) const {
    require_finite(m, "target return");
    double gap = m - v0(d);
    return gap * gap / (z0m_ - 1.0);
}

VarianceBreakdown HedgingModel::variance_B(double m, const Decision& d) const {
    validate_decision(d, demand());
    MeanWithError u = engine_.unhedgeable_sq(d);
    return VarianceBreakdown::make(investment_sq(m, d), u.value, u.standard_error);
}

VarianceBreakdown variance_B(double m, const Decision& d, const EouParams& params, const DemandParams& demand,
                             const HedgingConfig& cfg) {
    return HedgingModel(params, demand, cfg).variance_B(m, d);
}

} // namespace nvhedge
