#include "nvhedge/calibration.hpp"
#include "nvhedge/closed_forms.hpp"
#include "nvhedge/error.hpp"
#include "nvhedge/newsvendor.hpp"
#include "nvhedge/optimizer.hpp"
#include "nvhedge/stats.hpp"
#include "nvhedge/strategy.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace nvhedge;

namespace {

// Owns the model so the optimizer's reference stays valid for the Python object's lifetime.
class Problem {
public:
    Problem(const EouParams& asset, const DemandParams& demand, const HedgingConfig& cfg)
        : model_(std::make_unique<HedgingModel>(asset, demand, cfg)), opt_(*model_) {}

    const HedgingModel& model() const { return *model_; }
    const HedgeOptimizer& optimizer() const { return opt_; }

private:
    std::unique_ptr<HedgingModel> model_;
    HedgeOptimizer opt_;
};

} // namespace

PYBIND11_MODULE(_nvhedge, m) {
    m.doc() = "Price-setting newsvendor with mean-variance asset hedging";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    (void)error;

    py::enum_<Impact>(m, "Impact")
        .value("Positive", Impact::Positive)
        .value("Negative", Impact::Negative)
        .value("Inconclusive", Impact::Inconclusive);
    py::enum_<Measure>(m, "Measure").value("Real", Measure::Real).value("RiskNeutral", Measure::RiskNeutral);
    py::enum_<Alternative>(m, "Alternative").value("Greater", Alternative::Greater).value("Less", Alternative::Less);
    py::enum_<UTestMethod>(m, "UTestMethod")
        .value("Auto", UTestMethod::Auto)
        .value("Exact", UTestMethod::Exact)
        .value("Normal", UTestMethod::Normal);

    py::class_<EouParams>(m, "EouParams")
        .def(py::init([](double kappa, double alpha, double sigma, double x0, double horizon) {
                 EouParams p{kappa, alpha, sigma, x0, horizon};
                 p.validate();
                 return p;
             }),
             py::arg("kappa"), py::arg("alpha"), py::arg("sigma"), py::arg("x0"), py::arg("horizon") = 1.0 / 12.0)
        .def_readwrite("kappa", &EouParams::kappa)
        .def_readwrite("alpha", &EouParams::alpha)
        .def_readwrite("sigma", &EouParams::sigma)
        .def_readwrite("x0", &EouParams::x0)
        .def_readwrite("horizon", &EouParams::horizon)
        .def("long_run_mean", &EouParams::long_run_mean);

    py::class_<DemandParams>(m, "DemandParams")
        .def(py::init([](double mu0, double mu1, double sigma_tilde, double b, double c, double s) {
                 DemandParams d{mu0, mu1, sigma_tilde, b, c, s};
                 d.validate();
                 return d;
             }),
             py::arg("mu0"), py::arg("mu1"), py::arg("sigma_tilde"), py::arg("b"), py::arg("c"), py::arg("s") = 0.0)
        .def_readwrite("mu0", &DemandParams::mu0)
        .def_readwrite("mu1", &DemandParams::mu1)
        .def_readwrite("sigma_tilde", &DemandParams::sigma_tilde)
        .def_readwrite("b", &DemandParams::b)
        .def_readwrite("c", &DemandParams::c)
        .def_readwrite("s", &DemandParams::s);

    py::class_<DemandCoefficients>(m, "DemandCoefficients")
        .def(py::init<double, double, double, double, double>(), py::arg("A"), py::arg("B"), py::arg("b"),
             py::arg("c"), py::arg("sigma_tilde"))
        .def_readwrite("A", &DemandCoefficients::a)
        .def_readwrite("B", &DemandCoefficients::b_asset)
        .def_readwrite("b", &DemandCoefficients::b)
        .def_readwrite("c", &DemandCoefficients::c)
        .def_readwrite("sigma_tilde", &DemandCoefficients::sigma_tilde)
        .def("to_params", &DemandCoefficients::to_params, py::arg("horizon") = 1.0 / 12.0)
        .def_static("from_params", &DemandCoefficients::from_params, py::arg("params"),
                    py::arg("horizon") = 1.0 / 12.0);

    py::class_<PathGrid>(m, "PathGrid")
        .def_static("for_horizon", &PathGrid::for_horizon, py::arg("horizon"), py::arg("n_steps"))
        .def_readonly("n_steps", &PathGrid::n_steps)
        .def_readonly("dt", &PathGrid::dt);

    py::class_<Decision>(m, "Decision")
        .def(py::init<double, double>(), py::arg("p"), py::arg("r"))
        .def_readwrite("p", &Decision::p)
        .def_readwrite("r", &Decision::r);

    py::class_<VarianceBreakdown>(m, "VarianceBreakdown")
        .def_readonly("investment_sq", &VarianceBreakdown::investment_sq)
        .def_readonly("unhedgeable_sq", &VarianceBreakdown::unhedgeable_sq)
        .def_readonly("total", &VarianceBreakdown::total)
        .def_readonly("standard_error", &VarianceBreakdown::standard_error);

    py::class_<NvSolution>(m, "NvSolution")
        .def_readonly("p", &NvSolution::p)
        .def_readonly("r", &NvSolution::r)
        .def_readonly("q", &NvSolution::q)
        .def_readonly("profit", &NvSolution::profit);

    py::class_<FrontierPoint>(m, "FrontierPoint")
        .def_readonly("m", &FrontierPoint::m)
        .def_readonly("p", &FrontierPoint::p)
        .def_readonly("r", &FrontierPoint::r)
        .def_readonly("q", &FrontierPoint::q)
        .def_readonly("risk", &FrontierPoint::risk)
        .def_readonly("production_share", &FrontierPoint::production_share);

    py::class_<HedgeOptimum>(m, "HedgeOptimum")
        .def_readonly("m", &HedgeOptimum::m)
        .def_readonly("decision", &HedgeOptimum::decision)
        .def_readonly("q", &HedgeOptimum::q)
        .def_readonly("breakdown", &HedgeOptimum::breakdown)
        .def_readonly("v0", &HedgeOptimum::v0)
        .def_readonly("production_share", &HedgeOptimum::production_share);

    m.def(
        "terminal_market_size",
        [](const EouParams& asset, const DemandParams& demand, const PathGrid& grid, std::size_t n,
           std::uint64_t seed, Measure measure) {
            return simulate_terminal(asset, demand, grid, n, seed, measure).market;
        },
        py::arg("asset"), py::arg("demand"), py::arg("grid"), py::arg("n"), py::arg("seed"),
        py::arg("measure") = Measure::Real, "Samples of A_T.");

    m.def(
        "solve_newsvendor",
        [](const std::vector<double>& samples, const DemandParams& demand) {
            return solve_newsvendor(EmpiricalDist(samples), demand);
        },
        py::arg("samples"), py::arg("demand"));

    m.def(
        "z0m", [](const EouParams& asset) { return ClosedForms(asset).z0m(); }, py::arg("asset"));

    py::class_<HedgingConfig>(m, "HedgingConfig")
        .def(py::init([](std::size_t n_terminal, std::size_t n_outer, std::size_t n_inner, const PathGrid& grid,
                         std::uint64_t seed, unsigned threads) {
                 HedgingConfig c;
                 c.n_terminal = n_terminal;
                 c.mc.n_outer = n_outer;
                 c.mc.n_inner = n_inner;
                 c.mc.grid = grid;
                 c.mc.seed = seed;
                 c.mc.threads = threads;
                 return c;
             }),
             py::arg("n_terminal") = 100000, py::arg("n_outer") = 2000, py::arg("n_inner") = 500,
             py::arg("grid") = PathGrid::for_horizon(1.0 / 12.0, 21), py::arg("seed") = 0, py::arg("threads") = 0);

    py::class_<Problem>(m, "HedgingProblem")
        .def(py::init<const EouParams&, const DemandParams&, const HedgingConfig&>(), py::arg("asset"),
             py::arg("demand"), py::arg("config"))
        .def_property_readonly("newsvendor", [](const Problem& p) { return p.optimizer().nv_real(); })
        .def_property_readonly("z0m", [](const Problem& p) { return p.model().z0m(); })
        .def("v0", [](const Problem& p, const Decision& d) { return p.model().v0(d); })
        .def("variance", [](const Problem& p, double m, const Decision& d) { return p.model().variance_B(m, d); },
             py::arg("m"), py::arg("decision"))
        .def("optimize", [](const Problem& p, double m) { return p.optimizer().minimize_B(m); }, py::arg("m"))
        .def(
            "frontier",
            [](const Problem& p, const std::vector<double>& ms) {
                std::vector<FrontierPoint> out;
                for (const auto& h : p.optimizer().efficient_frontier(ms)) out.push_back(h.frontier_point());
                return out;
            },
            py::arg("m_grid"))
        .def(
            "frontier_no_hedge",
            [](const Problem& p, const std::vector<double>& ms) {
                return frontier_no_hedge(p.model().real_dist(), p.model().demand(), ms);
            },
            py::arg("m_grid"));

    py::class_<UTestResult>(m, "UTestResult")
        .def_readonly("u", &UTestResult::u)
        .def_readonly("z", &UTestResult::z)
        .def_readonly("p_value", &UTestResult::p_value)
        .def_readonly("exact", &UTestResult::exact);
    m.def(
        "mann_whitney_u",
        [](const std::vector<double>& x1, const std::vector<double>& x2, Alternative alt, UTestMethod method) {
            return mann_whitney_u(x1, x2, alt, method);
        },
        py::arg("sample1"), py::arg("sample2"), py::arg("alternative"),
          py::arg("method") = UTestMethod::Auto);

    m.def(
        "dominance",
        [](const EouParams& asset, const DemandParams& demand, std::size_t n, std::uint64_t seed) {
            DominanceConfig cfg;
            cfg.n = n;
            cfg.seed = seed;
            cfg.grid = PathGrid::for_horizon(asset.horizon, 21);
            auto rep = dominance_report(asset, demand, cfg);
            return py::make_tuple(rep.impact, rep.p_greater, rep.p_less);
        },
        py::arg("asset"), py::arg("demand"), py::arg("n") = 100000, py::arg("seed") = 0,
        "Impact classification with the one-sided p-values (greater, less).");

    m.def(
        "fit_eou",
        [](const std::vector<std::string>& dates, const std::vector<double>& prices, double nu, double horizon) {
            auto fit = fit_eou(PriceSeries{dates, prices}, nu, horizon);
            py::dict report;
            report["kappa_se"] = fit.report.kappa_se;
            report["alpha_se"] = fit.report.alpha_se;
            report["sigma_se"] = fit.report.sigma_se;
            report["residual_lag1_corr"] = fit.report.residual_lag1_corr;
            report["warnings"] = fit.report.warnings;
            return py::make_tuple(fit.params, report);
        },
        py::arg("dates"), py::arg("prices"), py::arg("nu") = 1.0 / 252.0, py::arg("horizon") = 1.0 / 12.0);

    m.def(
        "synthetic_prices",
        [](const EouParams& asset, std::size_t n, double nu, std::uint64_t seed) {
            auto s = synthetic_prices(asset, n, nu, seed);
            return py::make_tuple(s.dates, s.prices);
        },
        py::arg("asset"), py::arg("n"), py::arg("nu") = 1.0 / 252.0, py::arg("seed") = 0);
}
