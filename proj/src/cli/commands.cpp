#include "nvhedge/cli.hpp"

#include "nvhedge/error.hpp"
#include "nvhedge/hedging.hpp"
#include "nvhedge/newsvendor.hpp"
#include "nvhedge/optimizer.hpp"
#include "nvhedge/stats.hpp"
#include "nvhedge/strategy.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>

namespace nvhedge::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string millions(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2fM", v / 1e6);
    return buf;
}

std::string fixed(double v, int digits = 2) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string percent(double v) { return fixed(100.0 * v, 2) + "%"; }

void row(std::ostream& os, const std::string& label, const std::string& value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "  %-28s ", label.c_str());
    os << buf << value << '\n';
}

std::ofstream open_output(const fs::path& out_dir, const std::string& name) {
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + (out_dir / name).string());
    return out;
}

void write_json(const fs::path& out_dir, const std::string& name, const json& j) {
    auto out = open_output(out_dir, name);
    out << j.dump(2) << '\n';
}

std::string file_digest(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
    return buf;
}

HedgingConfig hedging_config(const RunConfig& cfg) {
    HedgingConfig h;
    h.n_terminal = cfg.n_terminal();
    h.mc.n_outer = cfg.n_outer();
    h.mc.n_inner = cfg.n_inner();
    h.mc.grid = cfg.grid();
    h.mc.seed = cfg.seed();
    h.mc.threads = cfg.threads();
    return h;
}

EmpiricalDist real_distribution(const RunConfig& cfg, const EouParams& asset, const DemandParams& demand) {
    return EmpiricalDist(
        simulate_terminal(asset, demand, cfg.grid(), cfg.n_terminal(), cfg.seed(), Measure::Real, cfg.threads())
            .market);
}

json demand_json(const DemandParams& d, double horizon) {
    auto k = DemandCoefficients::from_params(d, horizon);
    return {{"A", k.a}, {"B", k.b_asset}, {"b", k.b}, {"c", k.c}, {"sigma_tilde", k.sigma_tilde}, {"s", d.s}};
}

json breakdown_json(const VarianceBreakdown& b) {
    return {{"total", b.total},
            {"investment_sq", b.investment_sq},
            {"unhedgeable_sq", b.unhedgeable_sq},
            {"standard_error", b.standard_error}};
}

Impact classify(const RunConfig& cfg, const EouParams& asset, const DemandParams& demand) {
    DominanceConfig dc;
    dc.n = cfg.dominance_n();
    dc.seed = cfg.seed();
    dc.threads = cfg.threads();
    dc.grid = cfg.grid();
    return dominance_report(asset, demand, dc).impact;
}

} // namespace

void calibrate_asset(const fs::path& prices, double nu, double horizon, const fs::path& out_dir,
                     std::ostream& report) {
    auto series = read_prices(prices);
    auto fit = fit_eou(series, nu, horizon);
    const auto& r = fit.report;
    json j{{"kappa", fit.params.kappa},
           {"alpha", fit.params.alpha},
           {"sigma", fit.params.sigma},
           {"x0", fit.params.x0},
           {"horizon", fit.params.horizon},
           {"nu", nu},
           {"input_digest", file_digest(prices)},
           {"report",
            {{"observations", r.observations},
             {"ar_slope", r.ar_slope},
             {"ar_intercept", r.ar_intercept},
             {"kappa_se", r.kappa_se},
             {"alpha_se", r.alpha_se},
             {"sigma_se", r.sigma_se},
             {"rss", r.rss},
             {"residual_mean", r.residual_mean},
             {"residual_sd", r.residual_sd},
             {"residual_lag1_corr", r.residual_lag1_corr},
             {"warnings", r.warnings}}}};
    write_json(out_dir, "asset.json", j);

    report << "EOU fit (" << r.observations << " observations)\n";
    row(report, "kappa", fixed(fit.params.kappa, 4) + "  (se " + fixed(r.kappa_se, 4) + ")");
    row(report, "alpha", fixed(fit.params.alpha, 4) + "  (se " + fixed(r.alpha_se, 4) + ")");
    row(report, "sigma", fixed(fit.params.sigma, 4) + "  (se " + fixed(r.sigma_se, 4) + ")");
    row(report, "last price x0", fixed(fit.params.x0, 4));
    row(report, "residual lag-1 corr", fixed(r.residual_lag1_corr, 4));
    for (const auto& w : r.warnings) report << "  warning: " << w << '\n';
}

void calibrate_demand_cmd(const RunConfig& cfg, const fs::path& ops_file, const fs::path& asset_json,
                          const fs::path& out_dir, std::ostream& report) {
    auto ops = read_ops(ops_file);
    EouParams asset = read_asset_json(asset_json);
    asset.horizon = cfg.horizon();
    auto fit = calibrate_demand(ops, asset, cfg.demand_init(), cfg.demand_fit_options());
    const auto& r = fit.report;
    double mean_price = 0.0;
    for (double p : r.fitted_prices) mean_price += p;
    mean_price /= static_cast<double>(r.fitted_prices.size());
    const double margin = (mean_price - fit.coefficients.c) / mean_price;

    json j = demand_json(fit.params, asset.horizon);
    j["horizon"] = asset.horizon;
    j["config_hash"] = cfg.hash({"calibrate-demand", file_digest(ops_file), file_digest(asset_json)});
    j["seed"] = cfg.seed();
    j["report"] = {{"objective", r.objective},
                   {"converged", r.converged},
                   {"best_restart", r.best_restart},
                   {"restart_objectives", r.restart_objectives},
                   {"best_so_far", r.best_so_far},
                   {"fitted_prices", r.fitted_prices},
                   {"gross_margin", margin}};
    write_json(out_dir, "demand.json", j);

    report << "Demand fit (" << ops.size() << " months)\n";
    row(report, "A", fixed(fit.coefficients.a));
    row(report, "B", fixed(fit.coefficients.b_asset));
    row(report, "b", fixed(fit.coefficients.b, 4));
    row(report, "c", fixed(fit.coefficients.c));
    row(report, "sigma_tilde", fixed(fit.coefficients.sigma_tilde));
    row(report, "objective", format_number(r.objective));
    row(report, "converged", r.converged ? "yes" : "no");
    row(report, "gross margin", percent(margin));
}

void solve_nv(const RunConfig& cfg, const fs::path& out_dir, std::ostream& report) {
    const EouParams asset = cfg.asset();
    const DemandParams demand = cfg.demand();
    auto dist = real_distribution(cfg, asset, demand);
    auto checks = check_assumptions(dist, demand);
    auto nv = solve_newsvendor(dist, demand);
    const double risk = std::sqrt(payoff_variance(dist, nv.decision(), demand));
    const double se = expected_profit_se(dist, nv.decision(), demand);

    auto check_json = [](const AssumptionCheck& c) {
        return json{{"name", c.name}, {"passed", c.passed}, {"lhs", c.lhs}, {"rhs", c.rhs}};
    };
    json j{{"config_hash", cfg.hash({"solve-nv"})},
           {"seed", cfg.seed()},
           {"P", nv.p},
           {"R", nv.r},
           {"Q", nv.q},
           {"profit", nv.profit},
           {"profit_se", se},
           {"risk", risk},
           {"assumptions",
            {{"mean", checks.mean},
             {"stddev", checks.stddev},
             {"checks", {check_json(checks.positive_profit), check_json(checks.small_shortfall)}}}}};
    write_json(out_dir, "nv.json", j);

    report << "Newsvendor without hedging\n";
    row(report, "price P", fixed(nv.p));
    row(report, "VPQ R", fixed(nv.r));
    row(report, "quantity Q", fixed(nv.q));
    row(report, "expected profit", millions(nv.profit) + "  (se " + millions(se) + ")");
    row(report, "risk (sd)", millions(risk));
    for (const auto* c : {&checks.positive_profit, &checks.small_shortfall})
        row(report, c->name, c->passed ? "holds" : "fails");
}

void frontier(const RunConfig& cfg, const std::string& mode, const std::string& m_grid, const fs::path& out_dir,
              std::ostream& report) {
    if (mode != "hedge" && mode != "nohedge") fail(ErrorKind::InvalidInput, "--mode must be hedge or nohedge");
    const EouParams asset = cfg.asset();
    const DemandParams demand = cfg.demand();
    const std::vector<std::string> header{"m", "risk", "invest_risk_sq", "unhedge_risk_sq", "P",
                                          "R", "Q",    "production_share"};
    std::vector<FrontierPoint> points;
    if (mode == "nohedge") {
        auto dist = real_distribution(cfg, asset, demand);
        auto nv = solve_newsvendor(dist, demand);
        auto ms = resolve_m_grid(m_grid, nv.profit);
        points = frontier_no_hedge(dist, demand, ms);
    } else {
        HedgingModel model(asset, demand, hedging_config(cfg));
        HedgeOptimizer opt(model);
        auto ms = resolve_m_grid(m_grid, opt.nv_real().profit);
        for (const auto& h : opt.efficient_frontier(ms)) points.push_back(h.frontier_point());
    }

    auto out = open_output(out_dir, "frontier.csv");
    CsvWriter csv(out, cfg.hash({"frontier", mode, m_grid}), cfg.seed(), header);
    for (const auto& pt : points) {
        csv.cell(pt.m).cell(pt.risk);
        if (pt.breakdown)
            csv.cell(pt.breakdown->investment_sq).cell(pt.breakdown->unhedgeable_sq);
        else
            csv.empty().empty();
        csv.cell(pt.p).cell(pt.r).cell(pt.q).cell(pt.production_share);
        csv.end_row();
    }
    report << (mode == "hedge" ? "Hedging" : "No-hedge") << " frontier: " << points.size() << " points -> "
           << (out_dir / "frontier.csv").string() << '\n';
    for (const auto& pt : points) row(report, "m " + millions(pt.m), "risk " + millions(pt.risk));
}

void optimize(const RunConfig& cfg, const std::string& m_spec, const fs::path& out_dir, std::ostream& report) {
    const EouParams asset = cfg.asset();
    const DemandParams demand = cfg.demand();
    HedgingModel model(asset, demand, hedging_config(cfg));
    OptimizerOptions oo;
    HedgeOptimizer opt(model, oo);
    const NvSolution& nv = opt.nv_real();
    const double m = resolve_m(m_spec, nv.profit);
    if (m > nv.profit * (1.0 + 1e-12)) fail(ErrorKind::Infeasible, "target return exceeds the maximum expected profit");
    auto best = opt.minimize_B(m);
    const Impact impact = classify(cfg, asset, demand);
    auto bounds = check_bounds(opt, best, impact, oo.r_tol_rel * opt.nv_risk_neutral().r);

    const double m_ref[] = {m};
    const FrontierPoint plain = frontier_no_hedge(model.real_dist(), demand, m_ref).front();
    const double risk = std::sqrt(best.breakdown.total);
    const double unhedge_share = best.breakdown.total > 0.0 ? best.breakdown.unhedgeable_sq / best.breakdown.total : 0.0;

    json checks = json::array();
    for (const auto& c : bounds.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}});
    json j{{"config_hash", cfg.hash({"optimize", m_spec})},
           {"seed", cfg.seed()},
           {"m", m},
           {"P", best.decision.p},
           {"R", best.decision.r},
           {"Q", best.q},
           {"risk", risk},
           {"breakdown", breakdown_json(best.breakdown)},
           {"v0", best.v0},
           {"v0_se", best.v0_se},
           {"production_share", best.production_share},
           {"z0m", model.z0m()},
           {"no_hedge", {{"P", plain.p}, {"R", plain.r}, {"Q", plain.q}, {"risk", plain.risk}}},
           {"newsvendor", {{"P", nv.p}, {"R", nv.r}, {"Q", nv.q}, {"profit", nv.profit}}},
           {"risk_neutral_newsvendor", {{"P", opt.nv_risk_neutral().p}, {"R", opt.nv_risk_neutral().r}}},
           {"impact", to_string(impact)},
           {"bounds", {{"all_passed", bounds.all_passed()}, {"checks", checks}}}};
    if (bounds.hurt)
        j["bounds"]["hurting_condition"] = {{"lhs", bounds.hurt->lhs},
                                            {"rhs", bounds.hurt->rhs},
                                            {"r_ratio", bounds.hurt->r_ratio},
                                            {"satisfied", bounds.hurt->satisfied}};
    if (bounds.r_circ) j["bounds"]["r_circ"] = *bounds.r_circ;
    write_json(out_dir, "optimum.json", j);

    auto change = [](double with, double without) { return percent(with / without - 1.0); };
    report << "Hedging optimum at m = " << millions(m) << " (asset impact: " << to_string(impact) << ")\n";
    report << "                                 no hedge      hedge        change\n";
    auto line = [&](const char* label, const std::string& a, const std::string& b, const std::string& c) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "  %-28s %-13s %-12s %s\n", label, a.c_str(), b.c_str(), c.c_str());
        report << buf;
    };
    line("price P", fixed(plain.p), fixed(best.decision.p), change(best.decision.p, plain.p));
    line("VPQ R", fixed(plain.r), fixed(best.decision.r), change(best.decision.r, plain.r));
    line("quantity Q", fixed(plain.q), fixed(best.q), change(best.q, plain.q));
    line("risk", millions(plain.risk), millions(risk), change(risk, plain.risk));
    row(report, "production share of return", percent(best.production_share));
    row(report, "unhedgeable share of risk^2", percent(unhedge_share));
    row(report, "bound checks", bounds.all_passed() ? "all pass" : "FAILED");
    for (const auto& c : bounds.checks)
        row(report, std::string("  ") + c.name, std::string(c.passed ? "ok" : "violated") + "  (" +
                                                     format_number(c.value) + " vs " + format_number(c.bound) + ")");
}

void hedge_sim(const RunConfig& cfg, double p, double r, const std::string& m_spec, std::size_t paths,
               const fs::path& out_dir, std::ostream& report) {
    const EouParams asset = cfg.asset();
    const DemandParams demand = cfg.demand();
    require(paths >= 2, "--paths must be >= 2");
    HedgingModel model(asset, demand, hedging_config(cfg));
    const NvSolution nv = solve_newsvendor(model.real_dist(), demand);
    const double m = resolve_m(m_spec, nv.profit);
    const Decision d{p, r};
    auto ens = simulate_strategy(model, d, m, paths);
    auto st = decompose_risk(ens);
    auto b = model.variance_B(m, d);

    const std::string hash = cfg.hash({"hedge-sim", format_number(p), format_number(r), m_spec, std::to_string(paths)});
    auto out = open_output(out_dir, "hedge_paths.csv");
    CsvWriter csv(out, hash, cfg.seed(),
                  {"path", "terminal_wealth", "production_payoff", "chi_rm", "chi_iv", "hedged_production",
                   "asset_brownian_T"});
    for (std::size_t i = 0; i < ens.paths.size(); ++i) {
        const auto& sp = ens.paths[i];
        csv.cell(std::to_string(i))
            .cell(sp.terminal_wealth)
            .cell(sp.h_terminal)
            .cell(sp.chi_rm.back())
            .cell(sp.chi_iv.back())
            .cell(sp.hedged_production())
            .cell(sp.b_terminal);
        csv.end_row();
    }
    auto est = [](const Estimate& e) { return json{{"value", e.value}, {"standard_error", e.standard_error}}; };
    json j{{"config_hash", hash},
           {"seed", cfg.seed()},
           {"m", m},
           {"P", p},
           {"R", r},
           {"paths", paths},
           {"v0", ens.v0},
           {"gamma_m", ens.gamma_m},
           {"variance_B", breakdown_json(b)},
           {"simulated",
            {{"mean_wealth", est(st.mean_wealth)},
             {"variance", est(st.variance)},
             {"investment_sq", est(st.investment_sq)},
             {"unhedgeable_sq", est(st.unhedgeable_sq)},
             {"mean_investment", est(st.mean_investment)},
             {"mean_hedged_production", est(st.mean_hedged)},
             {"corr_hedged_brownian", st.corr_hedged_brownian},
             {"inconsistent", st.inconsistent}}}};
    write_json(out_dir, "hedge_sim.json", j);

    report << "Hedging strategy simulation (" << paths << " paths)\n";
    row(report, "target m", millions(m));
    row(report, "mean terminal wealth", millions(st.mean_wealth.value) + "  (se " +
                                             millions(st.mean_wealth.standard_error) + ")");
    row(report, "risk simulated", millions(std::sqrt(std::max(0.0, st.variance.value))));
    row(report, "risk sqrt(B)", millions(std::sqrt(b.total)));
    row(report, "investment risk^2 sim / B", format_number(st.investment_sq.value) + " / " +
                                                  format_number(b.investment_sq));
    row(report, "unhedgeable risk^2 sim / B", format_number(st.unhedgeable_sq.value) + " / " +
                                                   format_number(b.unhedgeable_sq));
    row(report, "corr(hedged payoff, B_T)", fixed(st.corr_hedged_brownian, 4));
}

void dominance_test(const RunConfig& cfg, const fs::path& out_dir, std::ostream& report) {
    const EouParams asset = cfg.asset();
    const DemandParams demand = cfg.demand();
    DominanceConfig dc;
    dc.n = cfg.dominance_n();
    dc.seed = cfg.seed();
    dc.threads = cfg.threads();
    dc.grid = cfg.grid();
    auto rep = dominance_report(asset, demand, dc);
    json j{{"config_hash", cfg.hash({"dominance-test"})},
           {"seed", cfg.seed()},
           {"samples", dc.n},
           {"impact", to_string(rep.impact)},
           {"p_greater", rep.p_greater},
           {"p_less", rep.p_less},
           {"mean_real", rep.mean_real},
           {"mean_risk_neutral", rep.mean_risk_neutral}};
    write_json(out_dir, "dominance.json", j);
    report << "Financial demand: real vs risk-neutral (" << dc.n << " draws each)\n";
    row(report, "impact", to_string(rep.impact));
    row(report, "p (real larger)", format_number(rep.p_greater));
    row(report, "p (real smaller)", format_number(rep.p_less));
    row(report, "mean C_T real", fixed(rep.mean_real));
    row(report, "mean C_T risk-neutral", fixed(rep.mean_risk_neutral));
}

void simulate(const RunConfig& cfg, const SimulateOptions& opts, const fs::path& out_file, std::ostream& report) {
    const EouParams asset = cfg.asset();
    const std::string hash = cfg.hash({"simulate", opts.what, std::to_string(opts.n), format_number(opts.nu),
                                       format_number(opts.price_noise), format_number(opts.sales_noise)});
    if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
    std::ofstream out(out_file, std::ios::binary);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + out_file.string());
    if (opts.what == "prices") {
        auto series = synthetic_prices(asset, opts.n, opts.nu, cfg.seed());
        CsvWriter csv(out, hash, cfg.seed(), {"date", "price"});
        for (std::size_t k = 0; k < series.prices.size(); ++k) {
            csv.cell(series.dates[k]).cell(series.prices[k]);
            csv.end_row();
        }
    } else if (opts.what == "ops") {
        const DemandParams demand = cfg.demand();
        auto truth = DemandCoefficients::from_params(demand, asset.horizon);
        auto ops = synthetic_ops(asset, truth, opts.n, opts.price_noise, opts.sales_noise, cfg.demand_fit_options(),
                                 cfg.seed());
        CsvWriter csv(out, hash, cfg.seed(), {"month", "sales", "price", "x0", "xbar"});
        for (std::size_t k = 0; k < ops.size(); ++k) {
            csv.cell(ops.months[k]).cell(ops.sales[k]).cell(ops.prices[k]).cell(ops.x0[k]).cell(ops.xbar[k]);
            csv.end_row();
        }
    } else {
        fail(ErrorKind::InvalidInput, "--what must be prices or ops");
    }
    report << "wrote " << opts.n << ' ' << opts.what << " rows to " << out_file.string() << '\n';
}

} // namespace nvhedge::cli
