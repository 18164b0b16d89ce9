#include "doctest.h"

#include "fixtures.hpp"
#include "nvhedge/error.hpp"
#include "nvhedge/optimizer.hpp"
#include "nvhedge/strategy.hpp"

#include <cmath>

using namespace nvhedge;

namespace {

HedgingConfig config(std::size_t n_outer, int steps = fixtures::kSteps) {
    HedgingConfig cfg;
    cfg.n_terminal = 50000;
    cfg.mc.n_outer = n_outer;
    cfg.mc.n_inner = 100;
    cfg.mc.grid = PathGrid::for_horizon(fixtures::kHorizon, steps);
    cfg.mc.seed = 21;
    return cfg;
}

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

} // namespace

TEST_CASE("hedge legs add up pathwise") {
    HedgingModel model(fixtures::wti(40.0), fixtures::sport(), config(200), false);
    HedgeOptimizer opt(model);
    const double m = opt.nv_real().profit;
    auto best = opt.minimize_B(m);
    auto ens = simulate_strategy(model, best.decision, m, 200);
    REQUIRE(ens.paths.size() == 200);
    CHECK(ens.gamma_m == doctest::Approx(gamma_m(m, ens.v0, ens.z0m)));
    for (const auto& p : ens.paths) {
        REQUIRE(p.chi.size() == static_cast<std::size_t>(fixtures::kSteps + 1));
        for (std::size_t j = 0; j < p.chi.size(); ++j)
            CHECK(p.chi[j] == doctest::Approx(p.chi_rm[j] + p.chi_iv[j]).epsilon(1e-9).scale(m));
        CHECK(p.terminal_wealth == doctest::Approx(p.h_terminal + p.chi.back()));
        CHECK(p.chi.front() == 0.0);
    }
    auto st = decompose_risk(ens);
    // Cov(iv, total) + Cov(hh, total) = Var(total)
    CHECK(st.investment_sq.value + st.unhedgeable_sq.value == doctest::Approx(st.variance.value).epsilon(1e-9));
}

TEST_CASE("simulated strategy reproduces the target and the minimum variance") {
    HedgingModel model(fixtures::wti(40.0), fixtures::sport(), config(1000), false);
    HedgeOptimizer opt(model);
    const double m = opt.nv_real().profit;
    auto best = opt.minimize_B(m);
    auto ens = simulate_strategy(model, best.decision, m, 1000);
    auto st = decompose_risk(ens);
    CHECK_FALSE(st.inconsistent);
    CHECK(std::abs(st.mean_wealth.value - m) <= 3.0 * st.mean_wealth.standard_error + 5e-3 * m);
    CHECK(std::abs(st.mean_investment.value - (m - best.v0)) <=
          3.0 * st.mean_investment.standard_error + 5e-3 * m);
    const double b = best.breakdown.total;
    CHECK(std::abs(st.variance.value - b) <=
          3.0 * combined(st.variance.standard_error, best.breakdown.standard_error) + 0.05 * b);
    // the unhedgeable part is orthogonal to the asset Brownian motion
    CHECK(std::abs(st.corr_hedged_brownian) < 4.0 / std::sqrt(1000.0));
}

TEST_CASE("no asset effect leaves only the investment leg") {
    auto demand = fixtures::sport();
    demand.mu1 = 0.0;
    HedgingModel model(fixtures::wti(40.0), demand, config(300), false);
    HedgeOptimizer opt(model);
    const double m = opt.nv_real().profit;
    auto best = opt.minimize_B(m);
    auto ens = simulate_strategy(model, best.decision, m, 300);
    for (const auto& p : ens.paths) {
        for (double x : p.chi_rm) CHECK(x == 0.0);
        CHECK(p.hedged_production() == p.h_terminal);
    }
}

TEST_CASE("target equal to V0 makes the investment leg worthless on average") {
    HedgingModel model(fixtures::wti(40.0), fixtures::compact(), config(600), false);
    HedgeOptimizer opt(model);
    Decision d = opt.nv_real().decision();
    const double v = model.v0(d);
    auto ens = simulate_strategy(model, d, v, 600);
    CHECK(ens.gamma_m == doctest::Approx(v));
    auto st = decompose_risk(ens);
    CHECK(std::abs(st.mean_investment.value) <= 3.0 * st.mean_investment.standard_error + 2e-3 * v);
}

TEST_CASE("risk estimate is stable under grid refinement") {
    Estimate v21, v42;
    double m = 0.0;
    Decision d;
    {
        HedgingModel model(fixtures::wti(40.0), fixtures::compact(), config(1500), false);
        HedgeOptimizer opt(model);
        m = opt.nv_real().profit;
        d = opt.minimize_B(m).decision;
        v21 = decompose_risk(simulate_strategy(model, d, m, 1500)).variance;
    }
    {
        HedgingModel model(fixtures::wti(40.0), fixtures::compact(), config(1500, 42), false);
        v42 = decompose_risk(simulate_strategy(model, d, m, 1500)).variance;
    }
    CAPTURE(v21.value);
    CAPTURE(v42.value);
    CHECK(std::abs(v42.value - v21.value) <=
          (0.02 * v21.value + 3.0 * combined(v21.standard_error, v42.standard_error)));
}

TEST_CASE("no-hedge decomposition degenerates as expected") {
    auto g = fixtures::grid();
    NestedMcConfig mc;
    mc.n_outer = 400;
    mc.n_inner = 100;
    mc.grid = g;
    mc.seed = 4;
    SUBCASE("no demand noise") {
        auto demand = fixtures::sport();
        demand.sigma_tilde = 0.0;
        NestedMcEngine engine(fixtures::wti(40.0), demand, mc, false);
        EmpiricalDist dist(simulate_terminal(fixtures::wti(40.0), demand, g, 50000, 4, Measure::Real).market);
        auto dec = risk_decomposition_no_hedge(engine, solve_newsvendor(dist, demand).decision());
        CHECK(dec.unhedgeable_sq.value == 0.0);
        CHECK(dec.financial_sq.value > 0.0);
    }
    SUBCASE("no asset effect") {
        auto demand = fixtures::sport();
        demand.mu1 = 0.0;
        NestedMcEngine engine(fixtures::wti(40.0), demand, mc, false);
        EmpiricalDist dist(simulate_terminal(fixtures::wti(40.0), demand, g, 50000, 4, Measure::Real).market);
        auto dec = risk_decomposition_no_hedge(engine, solve_newsvendor(dist, demand).decision());
        CHECK(dec.financial_sq.value == 0.0);
        // the martingale representation recovers the payoff variance
        CHECK(dec.unhedgeable_sq.value ==
              doctest::Approx(dec.payoff_variance.value).epsilon(0.1));
    }
}

TEST_CASE("strategy rejects inadmissible decisions") {
    HedgingModel model(fixtures::wti(40.0), fixtures::sport(), config(100), false);
    const auto& d = model.demand();
    CHECK_THROWS_AS(simulate_strategy(model, {0.5 * d.c, 1e5}, 1e8, 100), Error);
    CHECK_THROWS_AS(decompose_risk(StrategyEnsemble{}), Error);
}
