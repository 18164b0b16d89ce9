#include "doctest.h"

#include "fixtures.hpp"
#include "nvhedge/error.hpp"
#include "nvhedge/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using namespace nvhedge;

namespace {

HedgingConfig small_config(std::uint64_t seed = 3) {
    HedgingConfig cfg;
    cfg.n_terminal = 20000;
    cfg.mc.n_outer = 200;
    cfg.mc.n_inner = 100;
    cfg.mc.grid = fixtures::grid();
    cfg.mc.seed = seed;
    return cfg;
}

double bracket(const HurtingCondition& h, const NvSolution& nv, const DemandParams& d) {
    double r = std::max(h.r_ratio, 1.0);
    return (nv.p - d.s) / (r + std::sqrt(r * r - 1.0));
}

} // namespace

TEST_CASE("risk-neutral newsvendor matches the real one when the asset does not drive demand") {
    auto demand = fixtures::sport();
    demand.mu1 = 0.0;
    auto p = fixtures::wti(40.0);
    auto g = fixtures::grid();
    EmpiricalDist real(simulate_terminal(p, demand, g, 100000, 11, Measure::Real).market);
    EmpiricalDist rn(simulate_terminal(p, demand, g, 100000, 11, Measure::RiskNeutral).market);
    auto nv = solve_newsvendor(real, demand);
    auto nvm = risk_neutral_newsvendor(rn, demand);
    CHECK(nvm.p == doctest::Approx(nv.p).epsilon(2e-3));
    CHECK(nvm.r == doctest::Approx(nv.r).epsilon(2e-3));
}

TEST_CASE("risk-neutral price ordering follows the sign of the asset trend effect") {
    auto g = fixtures::grid();
    auto p = fixtures::wti(40.0);
    for (const char* name : {"sport", "compact"}) {
        auto demand = fixtures::car(name);
        EmpiricalDist real(simulate_terminal(p, demand, g, 100000, 1, Measure::Real).market);
        EmpiricalDist rn(simulate_terminal(p, demand, g, 100000, 1, Measure::RiskNeutral).market);
        auto nv = solve_newsvendor(real, demand);
        auto nvm = risk_neutral_newsvendor(rn, demand);
        CAPTURE(name);
        // rising oil hurts Sport demand and helps Compact demand
        if (std::string(name) == "sport")
            CHECK(nvm.p >= nv.p);
        else
            CHECK(nvm.p <= nv.p);
    }
}

TEST_CASE("price cap is the smallest root of V0 = m") {
    HedgingModel model(fixtures::wti(40.0), fixtures::compact(), small_config(), false);
    HedgeOptimizer opt(model);
    const auto& d = model.demand();
    const double m = opt.nv_real().profit;
    const double r_lo = d.b * d.c;
    for (double frac : {0.5, 0.8, 1.0}) {
        double r = r_lo + frac * (opt.nv_risk_neutral().r - r_lo);
        double cap = opt.price_cap(m, r);
        CAPTURE(frac);
        CHECK(cap >= d.c);
        if (model.v0({cap, r}) >= m * (1.0 - 1e-9)) {
            CHECK(model.v0({cap, r}) == doctest::Approx(m).epsilon(1e-8));
            // below the cap V0 stays under m
            for (int k = 1; k < 20; ++k) {
                double pk = d.c + (cap - d.c) * k / 20.0;
                if (r >= d.b * pk) CHECK(model.v0({pk, r}) <= m * (1.0 + 1e-9));
            }
        }
    }
    // unreachable target: cap is the V0 maximizer
    double r = opt.nv_risk_neutral().r;
    double cap = opt.price_cap(10.0 * m, r);
    double e = model.rn_dist().expected_overage(r);
    CHECK_THROWS_AS(opt.price_cap(m, 0.5 * r_lo), Error);
    CHECK(cap == doctest::Approx(std::min((r + d.b * d.c - e) / (2.0 * d.b), r / d.b)).epsilon(1e-12));
    // the cap never implies a negative quantity
    for (double frac : {0.3, 0.6}) {
        double rr = d.b * d.c + frac * (r - d.b * d.c);
        CHECK(opt.price_cap(m, rr) <= rr / d.b);
    }
}

TEST_CASE("inner price search matches a dense grid") {
    HedgingModel model(fixtures::wti(40.0), fixtures::sport(), small_config(), false);
    HedgeOptimizer opt(model);
    const auto& d = model.demand();
    const double m = opt.nv_real().profit;
    for (double frac : {0.5, 0.8, 1.0}) {
        double r = d.b * d.c + frac * (opt.nv_risk_neutral().r - d.b * d.c);
        auto [p, b] = opt.best_price(m, r);
        double cap = opt.price_cap(m, r);
        const double u = model.engine().unhedgeable_factor(r).value;
        double grid_min = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 4000; ++k) {
            double pk = d.c + (cap - d.c) * k / 4000.0;
            double noise = d.sigma_tilde * (pk - d.s);
            grid_min = std::min(grid_min, model.investment_sq(m, {pk, r}) + noise * noise * u);
        }
        CAPTURE(frac);
        CHECK(p >= d.c);
        CHECK(p <= cap);
        CHECK(b <= grid_min * (1.0 + 1e-9));
        CHECK(b == doctest::Approx(model.variance_B(m, {p, r}).total).epsilon(1e-9));
    }
}

TEST_CASE("minimize_B is at least as good as a brute-force VPQ scan") {
    HedgingModel model(fixtures::wti(40.0), fixtures::compact(), small_config(), false);
    HedgeOptimizer opt(model);
    const auto& d = model.demand();
    const double m = 0.98 * opt.nv_real().profit;
    auto best = opt.minimize_B(m);
    double scan = std::numeric_limits<double>::infinity();
    const double lo = d.b * d.c, hi = opt.nv_risk_neutral().r;
    for (int k = 0; k <= 120; ++k) scan = std::min(scan, opt.best_price(m, lo + (hi - lo) * k / 120.0).second);
    CHECK(best.breakdown.total <= scan * (1.0 + 1e-6));
    CHECK(best.decision.r >= lo);
    CHECK(best.decision.r <= hi);
    CHECK(best.q == doctest::Approx(best.decision.r - d.b * best.decision.p));
    CHECK(best.production_share == doctest::Approx(best.v0 / m));
    CHECK(best.breakdown.total == doctest::Approx(best.breakdown.investment_sq + best.breakdown.unhedgeable_sq));
    CHECK(best.breakdown.total ==
          doctest::Approx(model.variance_B(m, best.decision).total).epsilon(1e-9));
}

TEST_CASE("deterministic demand with no asset effect hedges away all risk") {
    auto demand = fixtures::sport();
    demand.mu1 = 0.0;
    demand.sigma_tilde = 0.0;
    HedgingModel model(fixtures::wti(40.0), demand, small_config(), false);
    HedgeOptimizer opt(model);
    const double m = 0.95 * opt.nv_real().profit;
    auto best = opt.minimize_B(m);
    CHECK(best.breakdown.total <= 1e-9 * m * m);
    CHECK(best.v0 == doctest::Approx(m).epsilon(1e-6));
    // ties at zero variance resolve toward the smallest price
    CHECK(best.decision.p <= opt.nv_real().p);
    auto again = opt.minimize_B(m);
    CHECK(again.decision.p == best.decision.p);
    CHECK(again.decision.r == best.decision.r);
}

TEST_CASE("optimum satisfies the structural bounds on small instances") {
    struct Case {
        const char* car;
        Impact impact;
    };
    for (Case cs : {Case{"sport", Impact::Negative}, Case{"compact", Impact::Positive}}) {
        HedgingModel model(fixtures::wti(40.0), fixtures::car(cs.car), small_config(), false);
        HedgeOptimizer opt(model);
        auto best = opt.minimize_B(opt.nv_real().profit);
        auto rep = check_bounds(opt, best, cs.impact, 1e-5 * opt.nv_risk_neutral().r);
        CAPTURE(cs.car);
        for (const auto& c : rep.checks) {
            CAPTURE(c.name);
            CAPTURE(c.value);
            CAPTURE(c.bound);
            CHECK(c.passed);
        }
        CHECK(rep.all_passed());
    }
}

TEST_CASE("hedging frontier is nondecreasing and pointwise optimal") {
    HedgingModel model(fixtures::wti(40.0), fixtures::compact(), small_config(), false);
    HedgeOptimizer opt(model);
    const double top = opt.nv_real().profit;
    std::vector<double> ms{0.9 * top, 0.95 * top, top};
    auto front = opt.efficient_frontier(ms);
    REQUIRE(front.size() == 3);
    for (std::size_t k = 1; k < front.size(); ++k)
        CHECK(front[k].breakdown.total >= front[k - 1].breakdown.total * (1.0 - 1e-6));
    HedgeOptimizer fresh(model);
    auto single = fresh.minimize_B(ms[1]);
    CHECK(single.breakdown.total == doctest::Approx(front[1].breakdown.total).epsilon(1e-9));
    auto pt = front[2].frontier_point();
    CHECK(pt.risk == doctest::Approx(std::sqrt(front[2].breakdown.total)));
    REQUIRE(pt.breakdown.has_value());

    std::vector<double> unsorted{top, 0.9 * top};
    CHECK_THROWS_AS(opt.efficient_frontier(unsorted), Error);
    CHECK_THROWS_AS(opt.minimize_B(-1.0), Error);
}

TEST_CASE("hurting condition sits on its boundary without an asset effect") {
    auto demand = fixtures::sport();
    demand.mu1 = 0.0;
    EmpiricalDist dist(simulate_terminal(fixtures::wti(40.0), demand, fixtures::grid(), 100000, 5,
                                         Measure::Real).market);
    auto nv = solve_newsvendor(dist, demand);
    // identical measures: P_circ is the newsvendor price itself
    auto h = hurting_condition(dist, nv, demand);
    CHECK(h.r_ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(h.lhs == doctest::Approx(h.rhs).epsilon(2e-4));
    try {
        double rc = compute_r_circ(dist, nv, demand);
        CHECK(rc == doctest::Approx(nv.r).epsilon(1e-3));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotApplicable);
    }
}

TEST_CASE("tail ratio behind R_circ is increasing") {
    auto demand = fixtures::sport();
    EmpiricalDist rn(simulate_terminal(fixtures::wti(40.0), demand, fixtures::grid(), 50000, 9,
                                       Measure::RiskNeutral).market);
    auto nv = solve_newsvendor(rn, demand);
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 50; ++k) {
        double r = nv.r * (0.95 + 0.1 * k / 50.0);
        double v = r_circ_lhs(rn, r);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("stronger upward trend raises r_circ and shrinks the bracket term") {
    // mean reversion and volatility amplified tenfold, Sport with a low starting oil price
    auto demand = fixtures::sport();
    auto g = fixtures::grid();
    double prev_r = 0.0, prev_bracket = std::numeric_limits<double>::infinity();
    for (double alpha : {3.6, 4.1847, 4.6}) {
        auto p = fixtures::wti(30.0);
        p.kappa *= 10.0;
        p.sigma *= 10.0;
        p.alpha = alpha;
        EmpiricalDist real(simulate_terminal(p, demand, g, 100000, 1, Measure::Real).market);
        EmpiricalDist rn(simulate_terminal(p, demand, g, 100000, 1, Measure::RiskNeutral).market);
        auto nv = solve_newsvendor(real, demand);
        auto nvm = risk_neutral_newsvendor(rn, demand);
        auto h = hurting_condition(rn, nv, demand);
        double br = bracket(h, nv, demand);
        CAPTURE(alpha);
        CHECK(h.r_ratio > prev_r);
        CHECK(br < prev_bracket);
        prev_r = h.r_ratio;
        prev_bracket = br;
        if (!h.satisfied) {
            double rc = compute_r_circ(rn, nv, demand);
            CHECK(rc >= nv.r);
            CHECK(rc <= nvm.r);
            // closer to the newsvendor VPQ than to the risk-neutral one
            CHECK(rc - nv.r < nvm.r - rc);
        }
    }
}
