#pragma once

#include "nvhedge/processes.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nvhedge {

struct PriceSeries {
    std::vector<std::string> dates; // ISO yyyy-mm-dd, strictly increasing
    std::vector<double> prices;

    void validate() const;
};

struct OpsSeries {
    std::vector<std::string> months;
    std::vector<double> sales;
    std::vector<double> prices;
    std::vector<double> x0;   // asset price on the first trading day of the month
    std::vector<double> xbar; // average asset price within the month

    std::size_t size() const { return months.size(); }
    void validate() const;
};

struct EouFitReport {
    std::size_t observations = 0;
    double ar_slope = 0.0;     // a in Y_{n+1} = a Y_n + b
    double ar_intercept = 0.0; // b
    double kappa = 0.0, alpha = 0.0, sigma = 0.0;
    double kappa_se = 0.0, alpha_se = 0.0, sigma_se = 0.0;
    double rss = 0.0;
    double residual_mean = 0.0;
    double residual_sd = 0.0;
    double residual_lag1_corr = 0.0;
    std::vector<std::string> warnings;
};

struct EouFit {
    EouParams params; // x0 = last observed price, horizon as requested
    EouFitReport report;
};

/// AR(1) least squares on log prices with step nu. A slope >= 1 is reported as a
/// warning and leaves kappa <= 0 in the result.
EouFit fit_eou(const PriceSeries& series, double nu = 1.0 / 252.0, double horizon = 1.0 / 12.0);

/// Demand-side parameters in the monthly units of the calibration:
/// A_T = A + B Xbar + sigma_tilde Btilde_T, demand = A_T - b P.
struct DemandCoefficients {
    double a = 0.0;
    double b_asset = 0.0;
    double b = 0.0;
    double c = 0.0;
    double sigma_tilde = 0.0;

    DemandParams to_params(double horizon) const;
    static DemandCoefficients from_params(const DemandParams& d, double horizon);
};

struct DemandFitOptions {
    std::size_t samples = 10000; // A_T draws per month, common across objective evaluations
    int restarts = 4;
    int max_iterations = 2000;    // per local search
    double simplex_tol = 1e-7;    // simplex size at convergence, relative to the start scale
    double start_spread = 0.15;   // relative perturbation of restart points
    std::uint64_t seed = 0;
    unsigned threads = 0;
    PathGrid grid{};
};

struct DemandFitReport {
    double objective = 0.0;
    std::vector<double> restart_objectives; // final objective per restart
    std::vector<double> best_so_far;        // nonincreasing trace over restarts
    std::vector<double> fitted_prices;      // P*_i at the estimate
    int best_restart = -1;
    bool converged = false;
};

struct DemandFit {
    DemandCoefficients coefficients;
    DemandParams params;
    DemandFitReport report;
};

/// Sum over months of (P*_i - P_i)^2 + (A + B Xbar_i - b P*_i - S_i)^2, with P*_i the
/// newsvendor price (s = 0) for month i's starting asset price.
class DemandObjective {
public:
    DemandObjective(const OpsSeries& ops, const EouParams& asset, const DemandFitOptions& opts);

    double operator()(const DemandCoefficients& k) const;
    std::vector<double> optimal_prices(const DemandCoefficients& k) const;
    std::size_t months() const { return ops_.size(); }

private:
    OpsSeries ops_;
    EouParams asset_;
    double horizon_;
    // per month: time-average of simulated asset paths and standard normal noise draws
    std::vector<std::vector<double>> path_mean_;
    std::vector<std::vector<double>> noise_;
};

/// Daily EOU prices on business days from start (yyyy-mm-dd), n observations with step nu.
PriceSeries synthetic_prices(const EouParams& params, std::size_t n, double nu, std::uint64_t seed,
                             const std::string& start = "2010-01-04");

/// Monthly operations data generated from the model: prices are the newsvendor prices of
/// the objective (same common random numbers as opts) plus Gaussian noise; sales are the
/// expected demand at the monthly average asset price plus noise.
OpsSeries synthetic_ops(const EouParams& asset, const DemandCoefficients& truth, std::size_t months,
                        double price_noise_sd, double sales_noise_sd, const DemandFitOptions& opts,
                        std::uint64_t seed, const std::string& first_month = "2010-01");

DemandFit calibrate_demand(const OpsSeries& ops, const EouParams& asset, const DemandCoefficients& init,
                           const DemandFitOptions& opts = {});

} // namespace nvhedge
