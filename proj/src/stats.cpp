#include "nvhedge/stats.hpp"

#include "nvhedge/error.hpp"
#include "nvhedge/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace nvhedge {

namespace {

struct Ranked {
    double rank_sum1 = 0.0;
    double tie_term = 0.0; // sum over tie groups of t^3 - t
    bool ties = false;
};

Ranked rank(std::span<const double> s1, std::span<const double> s2) {
    const std::size_t n = s1.size() + s2.size();
    std::vector<std::pair<double, bool>> all;
    all.reserve(n);
    for (double v : s1) all.emplace_back(v, true);
    for (double v : s2) all.emplace_back(v, false);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Ranked r;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && all[j].first == all[i].first) ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = 0.5 * static_cast<double>(i + 1 + j); // ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second) r.rank_sum1 += midrank;
        if (t > 1) {
            r.ties = true;
            r.tie_term += t * t * t - t;
        }
        i = j;
    }
    return r;
}

// P(U >= u) for the permutation distribution of U without ties.
double exact_upper_tail(std::size_t n1, std::size_t n2, double u) {
    // f[i][j][k]: arrangements of i values from sample 1 and j from sample 2 with U = k,
    // split on which sample holds the largest value
    const std::size_t max_u = n1 * n2;
    std::vector<std::vector<std::vector<double>>> f(
        n1 + 1, std::vector<std::vector<double>>(n2 + 1, std::vector<double>(max_u + 1, 0.0)));
    for (std::size_t i = 0; i <= n1; ++i)
        for (std::size_t j = 0; j <= n2; ++j) {
            if (i == 0 || j == 0) {
                f[i][j][0] = 1.0;
                continue;
            }
            for (std::size_t k = 0; k <= i * j; ++k) {
                double v = f[i][j - 1][k];
                if (k >= j) v += f[i - 1][j][k - j];
                f[i][j][k] = v;
            }
        }
    const auto& counts = f[n1][n2];
    double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    double tail = 0.0;
    for (std::size_t k = 0; k <= max_u; ++k)
        if (static_cast<double>(k) >= u - 1e-9) tail += counts[k];
    return tail / total;
}

} // namespace

UTestResult mann_whitney_u(std::span<const double> s1, std::span<const double> s2, Alternative alt,
                           UTestMethod method) {
    require(!s1.empty() && !s2.empty(), "Mann-Whitney test needs two non-empty samples");
    for (double v : s1) require_finite(v, "sample value");
    for (double v : s2) require_finite(v, "sample value");
    const double n1 = static_cast<double>(s1.size()), n2 = static_cast<double>(s2.size()), n = n1 + n2;
    Ranked r = rank(s1, s2);
    UTestResult out;
    out.u = r.rank_sum1 - n1 * (n1 + 1.0) / 2.0;

    bool exact = method == UTestMethod::Exact ||
                 (method == UTestMethod::Auto && !r.ties && s1.size() + s2.size() <= kExactLimit);
    if (exact) {
        require(!r.ties, "exact Mann-Whitney distribution requires untied samples");
        out.exact = true;
        out.p_value = alt == Alternative::Greater ? exact_upper_tail(s1.size(), s2.size(), out.u)
                                                  : exact_upper_tail(s1.size(), s2.size(), n1 * n2 - out.u);
        return out;
    }
    const double mean = n1 * n2 / 2.0;
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - r.tie_term / (n * (n - 1.0)));
    if (!(var > 0.0)) {
        out.z = 0.0;
        out.p_value = 1.0;
        return out;
    }
    const double sd = std::sqrt(var);
    if (alt == Alternative::Greater) {
        out.z = (out.u - mean - 0.5) / sd;
        out.p_value = norm_sf(out.z);
    } else {
        out.z = (out.u - mean + 0.5) / sd;
        out.p_value = norm_cdf(out.z);
    }
    return out;
}

DominanceReport dominance_report(const EouParams& params, const DemandParams& demand, const DominanceConfig& cfg) {
    require(cfg.n >= 1, "dominance test needs at least one sample");
    require(cfg.level > 0.0 && cfg.level < 1.0, "significance level must be in (0, 1)");
    auto real = simulate_terminal(params, demand, cfg.grid, cfg.n, cfg.seed, Measure::Real, cfg.threads).financial;
    auto rn = simulate_terminal(params, demand, cfg.grid, cfg.n, cfg.seed, Measure::RiskNeutral, cfg.threads).financial;
    DominanceReport rep;
    rep.mean_real = std::accumulate(real.begin(), real.end(), 0.0) / static_cast<double>(real.size());
    rep.mean_risk_neutral = std::accumulate(rn.begin(), rn.end(), 0.0) / static_cast<double>(rn.size());
    rep.p_greater = mann_whitney_u(real, rn, Alternative::Greater, UTestMethod::Normal).p_value;
    rep.p_less = mann_whitney_u(real, rn, Alternative::Less, UTestMethod::Normal).p_value;
    if (rep.p_greater < cfg.level)
        rep.impact = Impact::Positive;
    else if (rep.p_less < cfg.level)
        rep.impact = Impact::Negative;
    return rep;
}

} // namespace nvhedge
