// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.
// usage: acceptance [criterion ...]   (default: all)

#include "fixtures.hpp"
#include "oracles.hpp"

#include "nvhedge/calibration.hpp"
#include "nvhedge/closed_forms.hpp"
#include "nvhedge/newsvendor.hpp"
#include "nvhedge/optimizer.hpp"
#include "nvhedge/stats.hpp"
#include "nvhedge/strategy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace nvhedge;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
    bool passed = true;
    std::ostringstream detail;
    std::string failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            failures += " [failed: " + what + "]";
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel(double value, double ref) { return std::abs(value / ref - 1.0); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

HedgingConfig desk_config() {
    HedgingConfig cfg;
    cfg.n_terminal = 100000;
    cfg.mc.n_outer = 2000;
    cfg.mc.n_inner = 500;
    cfg.mc.grid = fixtures::grid();
    cfg.mc.seed = kSeed;
    return cfg;
}

// Desk-scale models and optima shared by the hedging criteria.
struct Instance {
    std::unique_ptr<HedgingModel> model;
    std::unique_ptr<HedgeOptimizer> opt;
    HedgeOptimum best;
    double build_seconds = 0.0;
};

std::map<std::pair<std::string, int>, Instance> g_instances;

Instance& instance(const std::string& car, int x0) {
    auto key = std::make_pair(car, x0);
    auto it = g_instances.find(key);
    if (it != g_instances.end()) return it->second;
    auto t0 = std::chrono::steady_clock::now();
    Instance inst;
    inst.model = std::make_unique<HedgingModel>(fixtures::wti(x0), fixtures::car(car), desk_config());
    inst.opt = std::make_unique<HedgeOptimizer>(*inst.model);
    inst.best = inst.opt->minimize_B(inst.opt->nv_real().profit);
    inst.build_seconds = seconds_since(t0);
    return g_instances.emplace(key, std::move(inst)).first->second;
}

// 1. Closed forms: terminal values and agreement with RK4.
void closed_forms(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto p = fixtures::wti();
    ClosedForms f(p);
    o.expect(f.a(0.0) == 1.5 && f.b(0.0) == 1.0, "a(0)=1.5, b(0)=1");
    o.expect(f.f0(0.0) == 0.0 && f.f1(0.0) == 0.0 && f.f2(0.0) == 0.0, "f(0)=0");
    const double tau_max = 0.9 * (std::numbers::pi / 4.0) / p.kappa;
    const int n = 4000;
    auto ref = oracles::rk4_riccati(p, tau_max, n);
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) {
        double tau = tau_max * k / n;
        worst = std::max({worst, std::abs(f.f0(tau) - ref[k][0]), std::abs(f.f1(tau) - ref[k][1]),
                          std::abs(f.f2(tau) - ref[k][2])});
    }
    double secs = seconds_since(t0);
    o.expect(worst < 1e-6, "RK4 max abs error < 1e-6");
    o.expect(secs < 1.0, "runtime < 1 s");
    o.detail << "max |f - RK4| = " << fmt("%.2e", worst) << " on tau in [0, " << fmt("%.3f", tau_max)
             << "], " << fmt("%.2f", secs) << " s";
}

// 2. Density process and risk-neutral martingale, simulated on the library's paths.
void measures(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto p = fixtures::wti(40.0);
    const std::size_t n = 100000;
    // Z_T needs a fine grid for the stochastic integral; the asset transitions are exact
    const auto grid = PathGrid::for_horizon(p.horizon, 252);
    auto real = simulate_paths(p, fixtures::sport(), grid, n, kSeed, Measure::Real);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = real[i];
        double log_z = 0.0;
        for (int j = 0; j < grid.n_steps; ++j) {
            double eta = market_price_of_risk(s.x_path[j], p);
            log_z += -eta * s.dB[j] - 0.5 * eta * eta * grid.dt;
        }
        z[i] = std::exp(log_z);
    }
    real.clear();
    real.shrink_to_fit();
    auto mz = oracles::mean_se(z, [](double v) { return v; });
    auto mz2 = oracles::mean_se(z, [](double v) { return v * v; });
    const double z0m = ClosedForms(p).z0m();
    auto rn = simulate_paths(p, fixtures::sport(), fixtures::grid(), n, kSeed + 1, Measure::RiskNeutral);
    auto mx = oracles::mean_se(rn, [](const MarketScenario& s) { return s.x_path.back(); });
    double secs = seconds_since(t0);
    o.expect(std::abs(mz.mean - 1.0) < 3.0 * mz.se, "|E[Z_T] - 1| < 3 SE");
    o.expect(std::abs(mz2.mean - z0m) < 3.0 * mz2.se, "|E[Z_T^2] - Z0M| < 3 SE");
    o.expect(std::abs(mx.mean - p.x0) < 3.0 * mx.se, "|E^M[X_T] - X0| < 3 SE");
    o.expect(secs < 30.0, "runtime < 30 s");
    o.detail << "E[Z]-1 = " << fmt("%.2e", mz.mean - 1.0) << " (se " << fmt("%.1e", mz.se) << "), E[Z^2] = "
             << fmt("%.5f", mz2.mean) << " vs " << fmt("%.5f", z0m) << " (se " << fmt("%.1e", mz2.se)
             << "), E^M[X_T] = " << fmt("%.3f", mx.mean) << " (se " << fmt("%.3f", mx.se) << "), "
             << fmt("%.1f", secs) << " s";
}

// 3. Newsvendor rows of the return table at X0 = 40.
void newsvendor_rows(Outcome& o) {
    struct Row {
        const char* car;
        double p, r, q, m, risk;
    };
    const Row rows[] = {{"sport", 42079, 100549, 15548, 103.41e6, 40.86e6},
                        {"compact", 21946, 154511, 9826, 12.90e6, 7.99e6}};
    for (const auto& row : rows) {
        auto t0 = std::chrono::steady_clock::now();
        auto demand = fixtures::car(row.car);
        EmpiricalDist dist(
            simulate_terminal(fixtures::wti(40.0), demand, fixtures::grid(), 100000, kSeed, Measure::Real).market);
        auto nv = solve_newsvendor(dist, demand);
        double risk = std::sqrt(payoff_variance(dist, nv.decision(), demand));
        double secs = seconds_since(t0);
        const std::string c = row.car;
        o.expect(rel(nv.p, row.p) <= 0.01, c + " P within 1%");
        o.expect(rel(nv.r, row.r) <= 0.01, c + " R within 1%");
        o.expect(rel(nv.q, row.q) <= 0.02, c + " Q within 2%");
        o.expect(rel(nv.profit, row.m) <= 0.02, c + " m within 2%");
        o.expect(rel(risk, row.risk) <= 0.05, c + " risk within 5%");
        o.expect(secs < 60.0, c + " runtime < 1 min");
        o.detail << c << ": P " << fmt("%.0f", nv.p) << " R " << fmt("%.0f", nv.r) << " Q " << fmt("%.0f", nv.q)
                 << " m " << fmt("%.2fM", nv.profit / 1e6) << " risk " << fmt("%.2fM", risk / 1e6) << " ("
                 << fmt("%.2f", secs) << " s); ";
    }
}

// 4. Hedging optimum for Sport at X0 = 40.
void hedging_optimum(Outcome& o) {
    auto& in = instance("sport", 40);
    const auto& nv = in.opt->nv_real();
    const auto& h = in.best;
    const double nv_risk = std::sqrt(payoff_variance(in.model->real_dist(), nv.decision(), in.model->demand()));
    const double p_down = 1.0 - h.decision.p / nv.p;
    const double r_down = 1.0 - h.decision.r / nv.r;
    const double risk_down = 1.0 - std::sqrt(h.breakdown.total) / nv_risk;
    o.expect(p_down >= 0.005 && p_down <= 0.02, "price markdown in [0.5%, 2.0%]");
    o.expect(r_down >= 0.008 && r_down <= 0.025, "VPQ markdown in [0.8%, 2.5%]");
    o.expect(risk_down >= 0.25 && risk_down <= 0.45, "risk reduction in [25%, 45%]");
    o.expect(h.production_share >= 0.93 && h.production_share <= 0.99, "production share in [93%, 99%]");
    o.expect(in.build_seconds < 900.0, "runtime < 15 min");
    o.detail << "price -" << fmt("%.2f%%", 100 * p_down) << ", VPQ -" << fmt("%.2f%%", 100 * r_down) << ", risk -"
             << fmt("%.2f%%", 100 * risk_down) << ", production share " << fmt("%.2f%%", 100 * h.production_share)
             << ", " << fmt("%.0f", in.build_seconds) << " s";
}

// 5. Structural bounds at m = nvmax for both cars and three starting prices.
void bound_suite(Outcome& o) {
    DominanceConfig dc;
    dc.n = 100000;
    dc.seed = kSeed;
    dc.grid = fixtures::grid();
    for (const char* car : {"sport", "compact"}) {
        for (int x0 : {40, 70, 100}) {
            auto& in = instance(car, x0);
            const Impact impact = dominance_report(fixtures::wti(x0), fixtures::car(car), dc).impact;
            OptimizerOptions defaults;
            auto rep = check_bounds(*in.opt, in.best, impact, defaults.r_tol_rel * in.opt->nv_risk_neutral().r);
            std::string name = std::string(car) + " X0=" + std::to_string(x0);
            for (const auto& c : rep.checks) o.expect(c.passed, name + " " + c.name);
            o.detail << name << " (" << to_string(impact) << (rep.r_circ ? ", R° bound" : "") << "): "
                     << (rep.all_passed() ? "ok" : "violated") << "; ";
        }
    }
}

// 6. Simulated strategy at the Sport X0 = 40 optimum.
void strategy_check(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto& in = instance("sport", 40);
    const auto& h = in.best;
    auto ens = simulate_strategy(*in.model, h.decision, h.m, 2000);
    auto st = decompose_risk(ens);
    double secs = seconds_since(t0);
    auto combined = [](double a, double b) { return std::sqrt(a * a + b * b); };
    const auto& b = h.breakdown;
    // the closed-form split shares the total's Monte Carlo error through U(R); the investment part is exact given V0
    const double unhedge_se = b.standard_error;
    o.expect(std::abs(st.mean_wealth.value - h.m) < 0.01 * h.m, "|mean wealth - m| < 1% m");
    o.expect(std::abs(st.variance.value - b.total) < 3.0 * combined(st.variance.standard_error, b.standard_error),
             "|variance - B| < 3 SE");
    o.expect(std::abs(st.investment_sq.value - b.investment_sq) < 3.0 * st.investment_sq.standard_error,
             "investment risk^2 within 3 SE");
    o.expect(std::abs(st.unhedgeable_sq.value - b.unhedgeable_sq) <
                 3.0 * combined(st.unhedgeable_sq.standard_error, unhedge_se),
             "unhedgeable risk^2 within 3 SE");
    o.expect(std::abs(st.corr_hedged_brownian) < 0.05, "|corr| < 0.05");
    o.expect(secs < 1200.0, "runtime < 20 min");
    o.detail << "mean " << fmt("%.2fM", st.mean_wealth.value / 1e6) << " vs m " << fmt("%.2fM", h.m / 1e6)
             << "; var " << fmt("%.3e", st.variance.value) << " vs B " << fmt("%.3e", b.total) << " (se "
             << fmt("%.1e", st.variance.standard_error) << "/" << fmt("%.1e", b.standard_error) << "); invest "
             << fmt("%.3e", st.investment_sq.value) << " vs " << fmt("%.3e", b.investment_sq) << "; unhedge "
             << fmt("%.3e", st.unhedgeable_sq.value) << " vs " << fmt("%.3e", b.unhedgeable_sq) << "; corr "
             << fmt("%.4f", st.corr_hedged_brownian) << "; " << fmt("%.0f", secs) << " s";
}

// 7. Frontiers on 90%..100% of nvmax.
void frontier_shape(Outcome& o) {
    for (const char* car : {"sport", "compact"}) {
        auto& in = instance(car, 40);
        const double nvmax = in.opt->nv_real().profit;
        std::vector<double> ms(11);
        for (int k = 0; k < 11; ++k) ms[k] = nvmax * (0.9 + 0.01 * k);
        ms.back() = nvmax;
        auto hedge = in.opt->efficient_frontier(ms);
        auto plain = frontier_no_hedge(in.model->real_dist(), in.model->demand(), ms);
        std::string c = car;
        for (std::size_t k = 0; k < ms.size(); ++k) {
            double risk = std::sqrt(hedge[k].breakdown.total);
            if (k > 0) o.expect(risk >= std::sqrt(hedge[k - 1].breakdown.total), c + " hedge risk nondecreasing");
            o.expect(risk < plain[k].risk, c + " hedge below no-hedge");
        }
        double first_gap = plain.front().risk - std::sqrt(hedge.front().breakdown.total);
        double last_gap = plain.back().risk - std::sqrt(hedge.back().breakdown.total);
        o.expect(last_gap > first_gap, c + " gap widens");
        o.detail << c << ": gap " << fmt("%.2fM", first_gap / 1e6) << " -> " << fmt("%.2fM", last_gap / 1e6) << "; ";
    }
}

// Exact one-sided p-values for the 3-vs-3 rank configuration `pick` by enumerating all 20 splits.
std::pair<double, double> enumerated_p(const std::vector<int>& pick) {
    auto u_of = [](const std::vector<int>& v) {
        int u = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i])
                for (std::size_t j = 0; j < i; ++j)
                    if (!v[j]) ++u;
        return u;
    };
    const int u_obs = u_of(pick);
    std::vector<int> all{0, 0, 0, 1, 1, 1};
    int total = 0, le = 0, ge = 0;
    do {
        int u = u_of(all);
        ++total;
        le += u <= u_obs;
        ge += u >= u_obs;
    } while (std::next_permutation(all.begin(), all.end()));
    return {static_cast<double>(ge) / total, static_cast<double>(le) / total};
}

// 8. Dominance classifications and the exact small-sample U-test.
void dominance(Outcome& o) {
    DominanceConfig dc;
    dc.n = 100000;
    dc.seed = kSeed;
    dc.grid = fixtures::grid();
    struct Case {
        const char* car;
        int x0;
        Impact expected;
    };
    for (const Case& c : {Case{"sport", 40, Impact::Negative}, Case{"sport", 100, Impact::Positive},
                          Case{"compact", 40, Impact::Positive}}) {
        auto rep = dominance_report(fixtures::wti(c.x0), fixtures::car(c.car), dc);
        double p = c.expected == Impact::Positive ? rep.p_greater : rep.p_less;
        std::string name = std::string(c.car) + " X0=" + std::to_string(c.x0);
        o.expect(rep.impact == c.expected && p < 0.01, name + " " + to_string(c.expected));
        o.detail << name << " " << to_string(rep.impact) << " p=" << fmt("%.2e", p) << "; ";
    }
    std::vector<int> pick{0, 0, 0, 1, 1, 1};
    int configs = 0, matched = 0;
    do {
        std::vector<double> x1, x2;
        for (int i = 0; i < 6; ++i) (pick[i] ? x1 : x2).push_back(static_cast<double>(i));
        auto [p_greater, p_less] = enumerated_p(pick);
        auto g = mann_whitney_u(x1, x2, Alternative::Greater, UTestMethod::Exact);
        auto l = mann_whitney_u(x1, x2, Alternative::Less, UTestMethod::Exact);
        ++configs;
        matched += std::abs(g.p_value - p_greater) < 1e-12 && std::abs(l.p_value - p_less) < 1e-12;
    } while (std::next_permutation(pick.begin(), pick.end()));
    o.expect(configs == 20 && matched == 20, "all 3-vs-3 exact p-values match enumeration");
    o.detail << "3-vs-3 exact p matches " << matched << "/" << configs;
}

// 9. Calibration round trips.
void calibration(Outcome& o) {
    auto truth = fixtures::wti(60.0);
    int good = 0;
    double worst_alpha = 0.0, worst_sigma = 0.0, worst_kappa = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto fit = fit_eou(synthetic_prices(truth, 2600, 1.0 / 252.0, seed)).params;
        double ea = rel(fit.alpha, truth.alpha), es = rel(fit.sigma, truth.sigma), ek = rel(fit.kappa, truth.kappa);
        worst_alpha = std::max(worst_alpha, ea);
        worst_sigma = std::max(worst_sigma, es);
        worst_kappa = std::max(worst_kappa, ek);
        good += ea <= 0.02 && es <= 0.02 && ek <= 0.25;
    }
    o.expect(good >= 18, "EOU fit within tolerance on >= 18 of 20 seeds");

    DemandFitOptions fo;
    fo.grid = fixtures::grid();
    fo.seed = kSeed;
    auto coeffs = DemandCoefficients::from_params(fixtures::sport(), fixtures::kHorizon);
    auto ops = synthetic_ops(truth, coeffs, 24, 0.0, 0.0, fo, kSeed);
    double scale = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) scale += ops.prices[i] * ops.prices[i] + ops.sales[i] * ops.sales[i];
    DemandObjective objective(ops, truth, fo);
    const double at_truth = objective(coeffs);
    o.expect(at_truth < 1e-4 * scale, "demand objective at truth < 1e-4 of data scale");
    o.detail << "EOU N=2600: " << good << "/20 seeds pass (worst alpha " << fmt("%.1f%%", 100 * worst_alpha)
             << ", sigma " << fmt("%.1f%%", 100 * worst_sigma) << ", kappa " << fmt("%.0f%%", 100 * worst_kappa)
             << "); demand objective / scale at truth " << fmt("%.1e", at_truth / scale);
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
        {"closed-form correctness", closed_forms},
        {"measure consistency", measures},
        {"newsvendor reproduction", newsvendor_rows},
        {"hedging optimum reproduction", hedging_optimum},
        {"bound suite", bound_suite},
        {"strategy verification", strategy_check},
        {"frontier monotonicity", frontier_shape},
        {"dominance tests", dominance},
        {"calibration round trips", calibration},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome o;
        try {
            criteria[k].second(o);
        } catch (const std::exception& e) {
            o.passed = false;
            o.failures += std::string(" [exception: ") + e.what() + "]";
        }
        failed += !o.passed;
        std::printf("%s %d %s: %s%s\n", o.passed ? "PASS" : "FAIL", id, criteria[k].first, o.detail.str().c_str(),
                    o.failures.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
