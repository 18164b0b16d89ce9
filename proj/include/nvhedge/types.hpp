#pragma once

#include <optional>

namespace nvhedge {

/// Price P and virtual production quantity R = Q + b P.
struct Decision {
    double p = 0.0;
    double r = 0.0;
};

/// Minimum variance B(m, P, R) split into squared investment and squared unhedgeable risk.
struct VarianceBreakdown {
    double investment_sq = 0.0;
    double unhedgeable_sq = 0.0;
    double total = 0.0;
    double standard_error = 0.0; // Monte Carlo standard error of total

    static VarianceBreakdown make(double investment_sq, double unhedgeable_sq, double standard_error = 0.0) {
        return {investment_sq, unhedgeable_sq, investment_sq + unhedgeable_sq, standard_error};
    }
};

/// Direction in which the asset price trend shifts the financial demand component:
/// positive when C_T dominates C_T^M stochastically, negative when it is dominated.
enum class Impact { Positive, Negative, Inconclusive };

const char* to_string(Impact impact) noexcept;

struct FrontierPoint {
    double m = 0.0;
    double p = 0.0;
    double r = 0.0;
    double q = 0.0;
    double risk = 0.0;
    // Present for hedging frontiers; the no-hedge frontier carries only total risk.
    std::optional<VarianceBreakdown> breakdown;
    double production_share = 1.0;
};

} // namespace nvhedge
