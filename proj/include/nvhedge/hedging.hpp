#pragma once

#include "nvhedge/empirical.hpp"
#include "nvhedge/nested_mc.hpp"
#include "nvhedge/processes.hpp"
#include "nvhedge/types.hpp"

#include <cstdint>

namespace nvhedge {

struct HedgingConfig {
    std::size_t n_terminal = 100000; // A_T samples per measure for V0 and the newsvendor
    NestedMcConfig mc{};
};

/// V0(P, R): expected profit under the risk-neutral distribution of A_T.
double v0(const EmpiricalDist& dist_m, const Decision& d, const DemandParams& demand);

/// lambda_m = (m Z0M - V0) / (Z0M - 1).
double gamma_m(double m, double v0, double z0m);

/// Everything needed to evaluate B(m, P, R) with common random numbers across decisions.
class HedgingModel {
public:
    HedgingModel(const EouParams& params, const DemandParams& demand, const HedgingConfig& cfg,
                 bool production = true);

    const EouParams& params() const { return engine_.params(); }
    const DemandParams& demand() const { return engine_.demand(); }
    const HedgingConfig& config() const { return cfg_; }
    const EmpiricalDist& real_dist() const { return real_; }
    const EmpiricalDist& rn_dist() const { return rn_; }
    const NestedMcEngine& engine() const { return engine_; }
    double z0m() const { return z0m_; }

    double v0(const Decision& d) const;
    /// Standard error of the risk-neutral sample mean behind v0.
    double v0_se(const Decision& d) const;

    double investment_sq(double m, const Decision& d) const;
    VarianceBreakdown variance_B(double m, const Decision& d) const;

private:
    HedgingConfig cfg_;
    NestedMcEngine engine_;
    EmpiricalDist real_;
    EmpiricalDist rn_;
    double z0m_ = 0.0;
};

/// One-shot evaluation; builds a HedgingModel internally.
VarianceBreakdown variance_B(double m, const Decision& d, const EouParams& params, const DemandParams& demand,
                             const HedgingConfig& cfg);

} // namespace nvhedge
