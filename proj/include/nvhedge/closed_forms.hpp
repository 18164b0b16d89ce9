#pragma once

#include "nvhedge/processes.hpp"

namespace nvhedge {

/// Auxiliary functions of the remaining time tau for the EOU hedging solution.
/// Valid for kappa * T < pi/4; construction fails otherwise.
class ClosedForms {
public:
    explicit ClosedForms(const EouParams& params);

    const EouParams& params() const { return p_; }

    double a(double tau) const;
    double b(double tau) const;
    double f0(double tau) const;
    double f1(double tau) const;
    double f2(double tau) const;

    /// Coefficient of (gamma_m - V_t - chi_t) / X_t in the optimal holding.
    double investment_ratio(double tau, double y) const;

    /// Z_t / Z_t^M at time t and log-price y.
    double z_ratio(double t, double y) const;

    /// Z_0^M = E[Z_T^2].
    double z0m() const;

private:
    struct Trig {
        double cos, sin, sin_over_kappa, one_minus_cos, d;
    };
    Trig trig(double tau) const;

    EouParams p_;
};

} // namespace nvhedge
