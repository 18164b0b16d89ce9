#include "nvhedge/calibration.hpp"

#include "nvhedge/empirical.hpp"
#include "nvhedge/error.hpp"
#include "nvhedge/newsvendor.hpp"
#include "nvhedge/parallel.hpp"
#include "nvhedge/random.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_fit.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

namespace nvhedge {

namespace {

std::chrono::year_month_day parse_date(const std::string& s) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3)
        fail(ErrorKind::InvalidInput, "bad date '" + s + "', expected yyyy-mm-dd");
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) fail(ErrorKind::InvalidInput, "invalid calendar date '" + s + "'");
    return ymd;
}

std::string format_date(std::chrono::year_month_day ymd) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

std::chrono::year_month parse_month(const std::string& s) {
    int y = 0;
    unsigned m = 0;
    char tail = 0;
    if (s.size() != 7 || std::sscanf(s.c_str(), "%4d-%2u%c", &y, &m, &tail) != 2)
        fail(ErrorKind::InvalidInput, "bad month '" + s + "', expected yyyy-mm");
    std::chrono::year_month ym{std::chrono::year{y}, std::chrono::month{m}};
    if (!ym.ok()) fail(ErrorKind::InvalidInput, "invalid month '" + s + "'");
    return ym;
}

std::string format_month(std::chrono::year_month ym) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ym.year()), static_cast<unsigned>(ym.month()));
    return buf;
}

} // namespace

void PriceSeries::validate() const {
    require(dates.size() == prices.size(), "price series: dates and prices differ in length");
    for (std::size_t k = 0; k < prices.size(); ++k) {
        require(std::isfinite(prices[k]) && prices[k] > 0.0, "price series: prices must be finite and > 0");
        auto d = std::chrono::sys_days{parse_date(dates[k])};
        if (k > 0) require(d > std::chrono::sys_days{parse_date(dates[k - 1])}, "price series: dates must increase");
    }
}

void OpsSeries::validate() const {
    const std::size_t n = months.size();
    require(sales.size() == n && prices.size() == n && x0.size() == n && xbar.size() == n,
            "ops series: columns differ in length");
    require(n >= 1, "ops series is empty");
    for (std::size_t k = 0; k < n; ++k) {
        parse_month(months[k]);
        require(std::isfinite(sales[k]) && sales[k] >= 0.0, "ops series: sales must be >= 0");
        require(std::isfinite(prices[k]) && prices[k] > 0.0, "ops series: prices must be > 0");
        require(std::isfinite(x0[k]) && x0[k] > 0.0, "ops series: x0 must be > 0");
        require(std::isfinite(xbar[k]) && xbar[k] > 0.0, "ops series: xbar must be > 0");
    }
}

EouFit fit_eou(const PriceSeries& series, double nu, double horizon) {
    series.validate();
    require(std::isfinite(nu) && nu > 0.0, "sampling step must be > 0");
    const std::size_t n_obs = series.prices.size();
    require(n_obs >= 100, "fit_eou needs at least 100 observations");
    const std::size_t n = n_obs - 1;
    std::vector<double> x(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = std::log(series.prices[k]);
        y[k] = std::log(series.prices[k + 1]);
    }
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*hi - *lo <= 1e-14 * std::max(1.0, std::abs(*hi)))
        fail(ErrorKind::DegenerateInput, "log prices have zero variance; AR(1) slope is undefined");

    double b = 0.0, a = 0.0, cov00 = 0.0, cov01 = 0.0, cov11 = 0.0, rss = 0.0;
    gsl_set_error_handler_off();
    if (gsl_fit_linear(x.data(), 1, y.data(), 1, n, &b, &a, &cov00, &cov01, &cov11, &rss) != GSL_SUCCESS)
        fail(ErrorKind::NumericalFailure, "least-squares fit failed");

    EouFit out;
    auto& r = out.report;
    r.observations = n_obs;
    r.ar_slope = a;
    r.ar_intercept = b;
    r.rss = rss;
    r.kappa = (1.0 - a) / nu;
    r.sigma = std::sqrt(rss / (static_cast<double>(n) * nu));
    r.kappa_se = std::sqrt(cov11) / nu;
    if (a < 1.0) {
        r.alpha = b / (1.0 - a);
        // delta method for b / (1 - a)
        double g_b = 1.0 / (1.0 - a), g_a = b / ((1.0 - a) * (1.0 - a));
        r.alpha_se = std::sqrt(std::max(0.0, g_b * g_b * cov00 + 2.0 * g_a * g_b * cov01 + g_a * g_a * cov11));
    } else {
        r.alpha = std::numeric_limits<double>::quiet_NaN();
        r.alpha_se = std::numeric_limits<double>::quiet_NaN();
        r.warnings.push_back("AR(1) slope >= 1: series is not mean-reverting (kappa <= 0)");
    }
    r.sigma_se = r.sigma / std::sqrt(2.0 * static_cast<double>(n));

    std::vector<double> res(n);
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        res[k] = y[k] - (b + a * x[k]);
        mean += res[k];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0, lag = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        ss += (res[k] - mean) * (res[k] - mean);
        if (k > 0) lag += (res[k] - mean) * (res[k - 1] - mean);
    }
    r.residual_mean = mean;
    r.residual_sd = std::sqrt(ss / static_cast<double>(n));
    r.residual_lag1_corr = ss > 0.0 ? lag / ss : 0.0;

    out.params = EouParams{r.kappa, r.alpha, r.sigma, series.prices.back(), horizon};
    return out;
}

DemandParams DemandCoefficients::to_params(double horizon) const {
    return DemandParams{a / horizon, b_asset / horizon, sigma_tilde, b, c, 0.0};
}

DemandCoefficients DemandCoefficients::from_params(const DemandParams& d, double horizon) {
    return DemandCoefficients{d.mu0 * horizon, d.mu1 * horizon, d.b, d.c, d.sigma_tilde};
}

DemandObjective::DemandObjective(const OpsSeries& ops, const EouParams& asset, const DemandFitOptions& opts)
    : ops_(ops), asset_(asset), horizon_(asset.horizon) {
    ops_.validate();
    require(opts.samples >= 100, "calibration needs at least 100 samples per month");
    PathGrid grid = opts.grid;
    grid.validate_against(asset_);
    const DemandParams unit_rate{0.0, 1.0, 0.0, 1.0, 1.0, 0.0}; // C_T = int X dt
    path_mean_.resize(ops_.size());
    noise_.resize(ops_.size());
    const auto domain = static_cast<std::uint64_t>(StreamDomain::Calibration);
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        EouParams p = asset_;
        p.x0 = ops_.x0[i];
        auto t = simulate_terminal(p, unit_rate, grid, opts.samples, stream_key(opts.seed, {domain, i}), Measure::Real,
                                   opts.threads);
        path_mean_[i] = std::move(t.financial);
        for (double& v : path_mean_[i]) v /= horizon_;
        GaussianStream rng(opts.seed, {domain, i, 1});
        noise_[i].resize(opts.samples);
        for (double& w : noise_[i]) w = rng();
    }
}

std::vector<double> DemandObjective::optimal_prices(const DemandCoefficients& k) const {
    DemandParams d{0.0, 0.0, k.sigma_tilde, k.b, k.c, 0.0};
    d.validate();
    const double noise_scale = k.sigma_tilde * std::sqrt(horizon_);
    std::vector<double> out(ops_.size());
    std::vector<double> a;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        a.resize(path_mean_[i].size());
        for (std::size_t s = 0; s < a.size(); ++s) a[s] = k.a + k.b_asset * path_mean_[i][s] + noise_scale * noise_[i][s];
        out[i] = solve_newsvendor(EmpiricalDist(a), d).p;
    }
    return out;
}

double DemandObjective::operator()(const DemandCoefficients& k) const {
    std::vector<double> p = optimal_prices(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        double dp = p[i] - ops_.prices[i];
        double ds = k.a + k.b_asset * ops_.xbar[i] - k.b * p[i] - ops_.sales[i];
        sum += dp * dp + ds * ds;
    }
    return sum;
}

namespace {

constexpr std::size_t kDim = 5;

std::array<double, kDim> to_array(const DemandCoefficients& k) { return {k.a, k.b_asset, k.b, k.c, k.sigma_tilde}; }

DemandCoefficients from_array(const std::array<double, kDim>& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

struct LocalSearch {
    const DemandObjective* objective;
    std::array<double, kDim> scale;
    double penalty;
};

double evaluate(const LocalSearch& ls, const gsl_vector* x) {
    std::array<double, kDim> v{};
    for (std::size_t k = 0; k < kDim; ++k) v[k] = gsl_vector_get(x, k) * ls.scale[k];
    DemandCoefficients coef = from_array(v);
    if (!(coef.b > 0.0) || !(coef.c > 0.0) || coef.sigma_tilde < 0.0) return ls.penalty;
    try {
        double f = (*ls.objective)(coef);
        return std::isfinite(f) ? f : ls.penalty;
    } catch (const Error&) {
        return ls.penalty;
    }
}

double gsl_objective(const gsl_vector* x, void* params) { return evaluate(*static_cast<LocalSearch*>(params), x); }

struct RestartResult {
    std::array<double, kDim> point{};
    double value = std::numeric_limits<double>::infinity();
    bool converged = false;
};

RestartResult nelder_mead(const LocalSearch& ls, const std::array<double, kDim>& start, const DemandFitOptions& opts) {
    using Minimizer = std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)>;
    using Vector = std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)>;
    Minimizer s(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, kDim), gsl_multimin_fminimizer_free);
    Vector x(gsl_vector_alloc(kDim), gsl_vector_free), step(gsl_vector_alloc(kDim), gsl_vector_free);
    for (std::size_t k = 0; k < kDim; ++k) {
        gsl_vector_set(x.get(), k, start[k] / ls.scale[k]);
        gsl_vector_set(step.get(), k, 0.05);
    }
    LocalSearch copy = ls;
    gsl_multimin_function f{&gsl_objective, kDim, &copy};
    gsl_multimin_fminimizer_set(s.get(), &f, x.get(), step.get());
    RestartResult out;
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), opts.simplex_tol) == GSL_SUCCESS) {
            out.converged = true;
            break;
        }
    }
    for (std::size_t k = 0; k < kDim; ++k) out.point[k] = gsl_vector_get(s->x, k) * ls.scale[k];
    out.value = s->fval;
    return out;
}

} // namespace

DemandFit calibrate_demand(const OpsSeries& ops, const EouParams& asset, const DemandCoefficients& init,
                           const DemandFitOptions& opts) {
    require(opts.restarts >= 1, "calibration needs at least one restart");
    require(opts.max_iterations >= 1, "calibration needs at least one iteration");
    DemandObjective objective(ops, asset, opts);
    gsl_set_error_handler_off();

    LocalSearch ls;
    ls.objective = &objective;
    const auto start = to_array(init);
    double data_scale = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) data_scale += ops.prices[i] * ops.prices[i] + ops.sales[i] * ops.sales[i];
    ls.penalty = 1e6 * (1.0 + data_scale);
    for (std::size_t k = 0; k < kDim; ++k) ls.scale[k] = std::abs(start[k]) > 0.0 ? std::abs(start[k]) : 1.0;

    std::vector<std::array<double, kDim>> starts(static_cast<std::size_t>(opts.restarts), start);
    for (int r = 1; r < opts.restarts; ++r) {
        GaussianStream rng(opts.seed, {static_cast<std::uint64_t>(StreamDomain::Calibration), 0xCA11B, static_cast<std::uint64_t>(r)});
        for (std::size_t k = 0; k < kDim; ++k) starts[r][k] = start[k] * (1.0 + opts.start_spread * (2.0 * rng.uniform() - 1.0));
    }
    std::vector<RestartResult> results(starts.size());
    parallel_for(starts.size(), opts.threads, [&](std::size_t r) { results[r] = nelder_mead(ls, starts[r], opts); });

    DemandFit fit;
    auto& rep = fit.report;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < results.size(); ++r) {
        rep.restart_objectives.push_back(results[r].value);
        if (results[r].value < best) {
            best = results[r].value;
            rep.best_restart = static_cast<int>(r);
        }
        rep.best_so_far.push_back(best);
    }
    const RestartResult& win = results[static_cast<std::size_t>(rep.best_restart)];
    if (!(win.value < ls.penalty)) fail(ErrorKind::NumericalFailure, "no restart reached a feasible demand model");
    fit.coefficients = from_array(win.point);
    fit.params = fit.coefficients.to_params(asset.horizon);
    rep.objective = win.value;
    rep.converged = win.converged;
    rep.fitted_prices = objective.optimal_prices(fit.coefficients);
    return fit;
}

PriceSeries synthetic_prices(const EouParams& params, std::size_t n, double nu, std::uint64_t seed,
                             const std::string& start) {
    params.validate();
    require(n >= 1, "need at least one observation");
    require(std::isfinite(nu) && nu > 0.0, "sampling step must be > 0");
    PriceSeries out;
    out.dates.reserve(n);
    out.prices.reserve(n);
    std::chrono::sys_days day{parse_date(start)};
    auto business = [](std::chrono::sys_days d) {
        auto wd = std::chrono::weekday{d};
        return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
    };
    while (!business(day)) day += std::chrono::days{1};
    GaussianStream rng(seed, {static_cast<std::uint64_t>(StreamDomain::Synthetic), 1});
    const double decay = std::exp(-params.kappa * nu);
    const double sd = params.kappa == 0.0
                          ? params.sigma * std::sqrt(nu)
                          : params.sigma * std::sqrt(-std::expm1(-2.0 * params.kappa * nu) / (2.0 * params.kappa));
    double y = params.y0();
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            y = params.alpha + (y - params.alpha) * decay + sd * rng();
            do day += std::chrono::days{1};
            while (!business(day));
        }
        out.dates.push_back(format_date(std::chrono::year_month_day{day}));
        out.prices.push_back(std::exp(y));
    }
    return out;
}

OpsSeries synthetic_ops(const EouParams& asset, const DemandCoefficients& truth, std::size_t months,
                        double price_noise_sd, double sales_noise_sd, const DemandFitOptions& opts,
                        std::uint64_t seed, const std::string& first_month) {
    asset.validate();
    require(months >= 1, "need at least one month");
    require(price_noise_sd >= 0.0 && sales_noise_sd >= 0.0, "noise levels must be >= 0");
    const int steps = opts.grid.n_steps;
    const double dt = opts.grid.dt;
    GaussianStream rng(seed, {static_cast<std::uint64_t>(StreamDomain::Synthetic), 2});
    const double decay = std::exp(-asset.kappa * dt);
    const double sd = asset.kappa == 0.0
                          ? asset.sigma * std::sqrt(dt)
                          : asset.sigma * std::sqrt(-std::expm1(-2.0 * asset.kappa * dt) / (2.0 * asset.kappa));
    OpsSeries ops;
    auto ym = parse_month(first_month);
    double y = asset.y0();
    for (std::size_t i = 0; i < months; ++i) {
        double x = std::exp(y);
        ops.months.push_back(format_month(ym));
        ops.x0.push_back(x);
        double integral = 0.0;
        for (int j = 0; j < steps; ++j) {
            y = asset.alpha + (y - asset.alpha) * decay + sd * rng();
            double next = std::exp(y);
            integral += 0.5 * (x + next) * dt;
            x = next;
        }
        ops.xbar.push_back(integral / (steps * dt));
        ym += std::chrono::months{1};
    }
    ops.prices.assign(months, 1.0);
    ops.sales.assign(months, 0.0);
    DemandObjective objective(ops, asset, opts);
    std::vector<double> p = objective.optimal_prices(truth);
    for (std::size_t i = 0; i < months; ++i) {
        ops.prices[i] = p[i] + price_noise_sd * rng();
        double s = truth.a + truth.b_asset * ops.xbar[i] - truth.b * p[i] + sales_noise_sd * rng();
        ops.sales[i] = std::max(0.0, s);
    }
    return ops;
}

} // namespace nvhedge
