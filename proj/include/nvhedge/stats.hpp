#pragma once

#include "nvhedge/processes.hpp"
#include "nvhedge/types.hpp"

#include <cstdint>
#include <span>

namespace nvhedge {

/// Alternative hypothesis about sample 1 relative to sample 2.
enum class Alternative { Greater, Less };

enum class UTestMethod {
    Auto,   // exact when there are no ties and n1 + n2 <= exact_limit, else normal
    Exact,  // permutation distribution; requires no ties
    Normal, // tie-corrected normal approximation with continuity correction
};

struct UTestResult {
    double u = 0.0;       // pairs with x1 > x2, ties counted as one half
    double z = 0.0;       // standardized statistic (normal method only)
    double p_value = 1.0; // one-sided
    bool exact = false;
};

inline constexpr std::size_t kExactLimit = 40;

UTestResult mann_whitney_u(std::span<const double> sample1, std::span<const double> sample2, Alternative alt,
                           UTestMethod method = UTestMethod::Auto);

struct DominanceConfig {
    std::size_t n = 100000;
    std::uint64_t seed = 0;
    double level = 0.01;
    unsigned threads = 0;
    PathGrid grid{};
};

struct DominanceReport {
    Impact impact = Impact::Inconclusive;
    double p_greater = 1.0; // H1: C_T stochastically larger than C_T^M
    double p_less = 1.0;    // H1: C_T stochastically smaller than C_T^M
    double mean_real = 0.0;
    double mean_risk_neutral = 0.0;
};

/// Compares simulated financial demand C_T under the real and risk-neutral measures.
DominanceReport dominance_report(const EouParams& params, const DemandParams& demand, const DominanceConfig& cfg);

} // namespace nvhedge
