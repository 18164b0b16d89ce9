#include "nvhedge/newsvendor.hpp"

#include "nvhedge/error.hpp"
#include "nvhedge/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nvhedge {

void validate_decision(const Decision& d, const DemandParams& demand) {
    require_finite(d.p, "price");
    require_finite(d.r, "vpq");
    require(d.p >= demand.c, "price must be >= unit cost");
    require(d.r >= demand.b * d.p * (1.0 - 1e-12), "vpq must be >= b * price");
}

double expected_profit(const EmpiricalDist& dist, const Decision& d, const DemandParams& demand) {
    validate_decision(d, demand);
    return (d.p - demand.c) * (d.r - demand.b * d.p) - (d.p - demand.s) * dist.expected_overage(d.r);
}

double payoff_variance(const EmpiricalDist& dist, const Decision& d, const DemandParams& demand) {
    validate_decision(d, demand);
    double margin = d.p - demand.s;
    return margin * margin * dist.overage_variance(d.r);
}

double expected_profit_se(const EmpiricalDist& dist, const Decision& d, const DemandParams& demand) {
    return std::sqrt(payoff_variance(dist, d, demand) / static_cast<double>(dist.size()));
}

double best_price_for(const EmpiricalDist& dist, double r, const DemandParams& demand) {
    return (dist.expected_min(r) + demand.b * demand.c) / (2.0 * demand.b);
}

double best_vpq_for(const EmpiricalDist& dist, double p, const DemandParams& demand) {
    return dist.quantile((p - demand.c) / (p - demand.s));
}

namespace {

NvSolution finish(const EmpiricalDist& dist, const DemandParams& demand, double p, int iterations, bool bisected) {
    NvSolution sol;
    sol.p = p;
    sol.r = best_vpq_for(dist, p, demand);
    sol.q = sol.r - demand.b * sol.p;
    sol.iterations = iterations;
    sol.used_bisection = bisected;
    if (!(sol.p > demand.c) || !(sol.q > 0.0))
        fail(ErrorKind::AssumptionViolated, "newsvendor solution has no interior price/quantity (P <= c or Q <= 0)");
    sol.profit = expected_profit(dist, sol.decision(), demand);
    if (!(sol.profit > 0.0))
        fail(ErrorKind::AssumptionViolated, "newsvendor maximum expected profit is not positive");
    return sol;
}

} // namespace

NvSolution solve_newsvendor(const EmpiricalDist& dist, const DemandParams& demand, const NvOptions& opts) {
    demand.validate();
    require(dist.size() >= 1, "empty distribution");
    const double b = demand.b, c = demand.c;
    const double p_hi = (dist.max() + b * c) / (2.0 * b);
    if (!(p_hi > c)) fail(ErrorKind::AssumptionViolated, "market size never exceeds b*c; no profitable price");

    // Marginal value of price along the profit-maximizing VPQ curve.
    auto marginal = [&](double p) {
        double r = best_vpq_for(dist, p, demand);
        return dist.expected_min(r) + b * c - 2.0 * b * p;
    };

    double p = std::clamp((dist.mean() + b * c) / (2.0 * b), std::nextafter(c, p_hi), p_hi);
    for (int it = 1; it <= opts.max_iterations; ++it) {
        double target = (dist.expected_min(best_vpq_for(dist, p, demand)) + b * c) / (2.0 * b);
        double next = (1.0 - opts.damping) * p + opts.damping * target;
        if (!(next > c)) break;
        if (std::abs(next - p) <= opts.tolerance * std::abs(p)) return finish(dist, demand, next, it, false);
        p = std::min(next, p_hi);
    }

    // Bisection on the marginal condition over (c, p_hi].
    double lo = std::nextafter(c, p_hi), hi = p_hi;
    double g_lo = marginal(lo), g_hi = marginal(hi);
    if (!(g_lo > 0.0) || g_hi > 0.0)
        fail(ErrorKind::AssumptionViolated, "no interior root of the newsvendor optimality equations");
    int it = 0;
    while (hi - lo > opts.tolerance * hi && it < 400) {
        double mid = 0.5 * (lo + hi);
        if (marginal(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        ++it;
    }
    return finish(dist, demand, 0.5 * (lo + hi), it, true);
}

std::optional<double> vpq_for_target(const EmpiricalDist& dist, double p, double m, const DemandParams& demand) {
    const double r_best = best_vpq_for(dist, p, demand);
    const double r_lo = demand.b * p;
    if (r_best <= r_lo) return std::nullopt;
    auto profit = [&](double r) { return expected_profit(dist, {p, r}, demand); };
    if (profit(r_best) < m) return std::nullopt;
    double lo = r_lo, hi = r_best;
    if (profit(lo) >= m) return lo;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (profit(mid) >= m)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

namespace {

FrontierPoint no_hedge_point(const EmpiricalDist& dist, const DemandParams& demand, double m, double p, double r) {
    FrontierPoint pt;
    pt.m = m;
    pt.p = p;
    pt.r = r;
    pt.q = r - demand.b * p;
    pt.risk = std::sqrt(payoff_variance(dist, {p, r}, demand));
    pt.production_share = 1.0;
    return pt;
}

} // namespace

std::vector<FrontierPoint> frontier_no_hedge(const EmpiricalDist& dist, const DemandParams& demand,
                                             std::span<const double> m_grid, const NoHedgeFrontierOptions& opts) {
    require(opts.price_grid >= 3, "price grid needs at least 3 points");
    const NvSolution nv = solve_newsvendor(dist, demand);
    const double c = demand.c;
    std::vector<FrontierPoint> out;
    out.reserve(m_grid.size());

    for (double m : m_grid) {
        require_finite(m, "target return");
        require(m > 0.0, "target return must be > 0");
        if (m > nv.profit * (1.0 + 1e-12))
            fail(ErrorKind::Infeasible, "target return exceeds the maximum expected profit");
        if (m >= nv.profit * (1.0 - 1e-12)) {
            out.push_back(no_hedge_point(dist, demand, m, nv.p, nv.r));
            continue;
        }
        auto variance_at = [&](double p) {
            auto r = vpq_for_target(dist, p, m, demand);
            if (!r) return std::numeric_limits<double>::infinity();
            return payoff_variance(dist, {p, *r}, demand);
        };
        const int n = opts.price_grid;
        std::vector<double> grid(n), var(n);
        int best = -1;
        for (int k = 0; k < n; ++k) {
            grid[k] = c + (nv.p - c) * static_cast<double>(k) / (n - 1);
            var[k] = variance_at(grid[k]);
            if (best < 0 || var[k] < var[best]) best = k;
        }
        if (best < 0 || !std::isfinite(var[best]))
            fail(ErrorKind::Infeasible, "no price on the grid attains the target return");

        double lo = grid[std::max(0, best - 1)], hi = grid[std::min(n - 1, best + 1)];
        LineMinimum refined = golden_section(variance_at, lo, hi, opts.refine_tolerance * hi);
        double p_best = grid[best];
        if (refined.value < var[best]) p_best = refined.x;
        out.push_back(no_hedge_point(dist, demand, m, p_best, *vpq_for_target(dist, p_best, m, demand)));
    }
    return out;
}

AssumptionReport check_assumptions(const EmpiricalDist& dist, const DemandParams& demand) {
    demand.validate();
    require(dist.size() >= 1000, "assumption checks need at least 1000 samples");
    const double b = demand.b, c = demand.c, s = demand.s;
    AssumptionReport rep;
    rep.mean = dist.mean();
    rep.stddev = dist.stddev();
    const double mu = rep.mean, sd = rep.stddev;

    rep.positive_profit.name = "mean market size threshold";
    rep.positive_profit.lhs = mu;
    rep.positive_profit.rhs = 0.5 * (sd + 2.0 * b * c + std::sqrt(8.0 * b * (c - s) * sd));
    rep.positive_profit.passed = rep.positive_profit.lhs > rep.positive_profit.rhs;

    rep.p0 = dist.cdf(b * c);
    rep.eps0 = dist.expected_negative_part();
    double gap = mu - b * c - 0.5 * sd;
    rep.f_star = (gap * gap - 2.0 * b * (c - s) * sd) / (4.0 * b);
    rep.small_shortfall.name = "shortfall below b*c";
    rep.small_shortfall.lhs = b * c * rep.p0 + rep.eps0;
    double root_term = rep.f_star > 0.0 ? 2.0 * std::sqrt(b * rep.f_star) : 0.0;
    rep.small_shortfall.rhs = std::min(2.0 * b * (c - s), root_term);
    rep.small_shortfall.passed = rep.small_shortfall.lhs <= rep.small_shortfall.rhs;
    return rep;
}

} // namespace nvhedge
