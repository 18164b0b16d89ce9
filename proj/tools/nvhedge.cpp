// nvhedge: command-line workbench for the price-setting newsvendor with asset hedging.

#include "nvhedge/cli.hpp"
#include "nvhedge/error.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>

namespace {

using namespace nvhedge;

int report_error(const char* kind, int code, const std::string& message) {
    nlohmann::json line{{"error", kind}, {"exit_code", code}, {"message", message}};
    std::cerr << line.dump() << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Price-setting newsvendor with mean-variance asset hedging"};
    app.require_subcommand(1);

    std::string config_file;
    std::string out_dir;
    std::vector<std::string> overrides;
    int threads = -1;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_file, "flat key = value run configuration");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--set", overrides, "override a config entry, key=value");
        sub->add_option("--out", out_dir, "output directory (default: output_dir from config, else .)");
        sub->add_option("--threads", threads, "worker threads, 0 = hardware concurrency")->check(CLI::NonNegativeNumber);
    };

    std::string prices;
    double nu = 1.0 / 252.0;
    double horizon = 1.0 / 12.0;
    auto* cal_asset = app.add_subcommand("calibrate-asset", "fit EOU parameters to daily prices");
    cal_asset->add_option("--prices", prices, "CSV with columns date,price")->required()->check(CLI::ExistingFile);
    cal_asset->add_option("--nu", nu, "sampling step in years");
    cal_asset->add_option("--horizon", horizon, "selling horizon stored with the fit");
    cal_asset->add_option("--out", out_dir, "output directory");

    std::string ops, asset_json;
    auto* cal_demand = app.add_subcommand("calibrate-demand", "fit demand parameters to monthly operations data");
    cal_demand->add_option("--ops", ops, "CSV with columns month,sales,price,x0,xbar")->required()->check(CLI::ExistingFile);
    cal_demand->add_option("--asset", asset_json, "asset JSON from calibrate-asset")->required()->check(CLI::ExistingFile);
    add_common(cal_demand, true);

    auto* nv = app.add_subcommand("solve-nv", "newsvendor solution and assumption report");
    add_common(nv, true);

    std::string mode = "hedge", m_grid = "0.9*nvmax:nvmax:11";
    auto* front = app.add_subcommand("frontier", "mean-risk frontier as CSV");
    front->add_option("--mode", mode, "hedge or nohedge")->check(CLI::IsMember({"hedge", "nohedge"}));
    front->add_option("--m-grid", m_grid, "a:b:n, endpoints absolute or <f>*nvmax");
    add_common(front, true);

    std::string m_spec;
    auto* opt = app.add_subcommand("optimize", "minimum-variance decision with bound checks");
    opt->add_option("--m", m_spec, "target return: amount, nvmax or <f>*nvmax");
    add_common(opt, true);

    double p = 0.0, r = 0.0;
    std::size_t paths = 2000;
    auto* sim = app.add_subcommand("hedge-sim", "simulate the optimal hedge for a fixed decision");
    sim->add_option("--p", p, "price")->required();
    sim->add_option("--r", r, "virtual production quantity")->required();
    sim->add_option("--m", m_spec, "target return: amount, nvmax or <f>*nvmax");
    sim->add_option("--paths", paths, "strategy paths");
    add_common(sim, true);

    auto* dom = app.add_subcommand("dominance-test", "real vs risk-neutral financial demand U-test");
    add_common(dom, true);

    cli::SimulateOptions sopts;
    std::string sim_out;
    auto* gen = app.add_subcommand("simulate", "emit synthetic prices or operations CSV (debug)");
    gen->add_option("--what", sopts.what, "prices or ops")->check(CLI::IsMember({"prices", "ops"}));
    gen->add_option("--n", sopts.n, "observations (prices) or months (ops)");
    gen->add_option("--nu", sopts.nu, "sampling step in years for prices");
    gen->add_option("--price-noise", sopts.price_noise, "price noise sd for ops");
    gen->add_option("--sales-noise", sopts.sales_noise, "sales noise sd for ops");
    gen->add_option("--file", sim_out, "output CSV path")->required();
    add_common(gen, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("invalid-input", 2, e.what());
    }

    try {
        if (cal_asset->parsed()) {
            cli::calibrate_asset(prices, nu, horizon, out_dir.empty() ? "." : out_dir, std::cout);
            return 0;
        }
        cli::RunConfig cfg = cli::RunConfig::load(config_file);
        for (const auto& kv : overrides) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) fail(ErrorKind::InvalidInput, "--set expects key=value");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (threads >= 0) cfg.set("threads", std::to_string(threads));
        cfg.seed(); // required for every run
        const std::filesystem::path dir = out_dir.empty() ? cfg.output_dir() : std::filesystem::path(out_dir);
        if (m_spec.empty()) m_spec = cfg.m_spec().value_or("nvmax");

        if (cal_demand->parsed())
            cli::calibrate_demand_cmd(cfg, ops, asset_json, dir, std::cout);
        else if (nv->parsed())
            cli::solve_nv(cfg, dir, std::cout);
        else if (front->parsed())
            cli::frontier(cfg, mode, m_grid, dir, std::cout);
        else if (opt->parsed())
            cli::optimize(cfg, m_spec, dir, std::cout);
        else if (sim->parsed())
            cli::hedge_sim(cfg, p, r, m_spec, paths, dir, std::cout);
        else if (dom->parsed())
            cli::dominance_test(cfg, dir, std::cout);
        else if (gen->parsed())
            cli::simulate(cfg, sopts, sim_out, std::cout);
        return 0;
    } catch (const Error& e) {
        return report_error(to_string(e.kind()), exit_code(e.kind()), e.what());
    } catch (const std::exception& e) {
        return report_error("numerical-failure", 4, e.what());
    }
}
