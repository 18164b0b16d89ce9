#pragma once

#include "nvhedge/closed_forms.hpp"
#include "nvhedge/processes.hpp"
#include "nvhedge/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nvhedge {

struct NestedMcConfig {
    std::size_t n_outer = 2000;
    std::size_t n_inner = 500;
    PathGrid grid{};
    std::uint64_t seed = 0;
    unsigned threads = 0;

    /// Production runs need n_outer >= 100 and n_inner >= 50; tests may pass production = false.
    void validate(bool production = true) const;
};

/// Conditioning state at grid index j: asset price x and accumulated market size a = A_t.
struct ConditionalState {
    int j = 0;
    double x = 0.0;
    double a = 0.0;
};

/// For n risk-neutral GBM paths started at 1 at grid index j, the trapezoid integral of the
/// path over [t_j, T] on the grid. Empty-interval integrals (j == n_steps) are zero.
std::vector<double> inner_integrals(const EouParams& params, const PathGrid& grid, int j, std::size_t n,
                                    std::uint64_t stream);

/// The following evaluate conditional risk-neutral quantities given inner integrals I_k for
/// state.j; at j == n_steps the integrals are ignored and A_T = state.a.
///
/// P^M(A_T <= R | state).
double service_probability(const DemandParams& demand, const PathGrid& grid, ConditionalState state, double r,
                           std::span<const double> integrals);
/// delta_t = sigma_tilde (P - s) P^M(A_T <= R | state).
double delta_t(const DemandParams& demand, const PathGrid& grid, ConditionalState state, const Decision& d,
               std::span<const double> integrals);
/// xi_t = (P - s) mu1 E^M[1{A_T <= R} int_t^T X_u du / X_t | state].
double xi_t(const DemandParams& demand, const PathGrid& grid, ConditionalState state, const Decision& d,
            std::span<const double> integrals);
/// V_t = E^M[H_T | state].
double projected_payoff(const DemandParams& demand, const PathGrid& grid, ConditionalState state,
                        const Decision& d, std::span<const double> integrals);

/// Convenience forms that draw fresh inner paths from (cfg.seed, state.j).
double delta_t(const EouParams& params, const DemandParams& demand, const NestedMcConfig& cfg,
               ConditionalState state, const Decision& d);
double xi_t(const EouParams& params, const DemandParams& demand, const NestedMcConfig& cfg, ConditionalState state,
            const Decision& d);

struct MeanWithError {
    double value = 0.0;
    double standard_error = 0.0;
};

/// Outer real-measure paths plus cached inner integrals, the Z-ratio, and everything the
/// variance functional and strategy simulation need. Read-only after construction.
class NestedMcEngine {
public:
    NestedMcEngine(const EouParams& params, const DemandParams& demand, const NestedMcConfig& cfg,
                   bool production = true);

    const EouParams& params() const { return params_; }
    const DemandParams& demand() const { return demand_; }
    const NestedMcConfig& config() const { return cfg_; }
    const ClosedForms& closed_forms() const { return forms_; }
    std::size_t n_outer() const { return outer_.size(); }
    int n_steps() const { return cfg_.grid.n_steps; }

    const MarketScenario& outer(std::size_t i) const { return outer_[i]; }
    ConditionalState state(std::size_t i, int j) const;
    double ratio(std::size_t i, int j) const { return ratio_[i * points() + static_cast<std::size_t>(j)]; }
    std::span<const double> integrals(std::size_t i, int j) const;

    double service_probability(std::size_t i, int j, double r) const;
    double delta(std::size_t i, int j, const Decision& d) const;
    double xi(std::size_t i, int j, const Decision& d) const;
    double projected_payoff(std::size_t i, int j, const Decision& d) const;

    /// U(R) = int_0^T E[(Z_t/Z_t^M) P^M(A_T <= R | F_t)^2] dt, so that the squared
    /// unhedgeable risk is sigma_tilde^2 (P - s)^2 U(R). The demand-noise state is independent
    /// of the asset, so a one-normal proxy whose noise average is known in closed form serves
    /// as a control variate at every grid time.
    MeanWithError unhedgeable_factor(double r) const;
    MeanWithError unhedgeable_sq(const Decision& d) const;

private:
    std::size_t points() const { return static_cast<std::size_t>(cfg_.grid.n_steps) + 1; }

    EouParams params_;
    DemandParams demand_;
    NestedMcConfig cfg_;
    ClosedForms forms_;
    std::vector<MarketScenario> outer_;
    std::vector<double> ratio_;
    std::vector<double> inner_;            // all I_k, grouped by (i, j)
    std::vector<std::size_t> inner_offset_; // start of block j within one outer path
    std::vector<double> inner_mean_;       // mean and variance of the I_k block per (i, j)
    std::vector<double> inner_var_;
    std::size_t inner_per_path_ = 0;
};

} // namespace nvhedge
