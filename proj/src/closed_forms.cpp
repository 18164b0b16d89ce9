#include "nvhedge/closed_forms.hpp"

#include "nvhedge/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nvhedge {

ClosedForms::ClosedForms(const EouParams& params) : p_(params) {
    p_.validate();
    if (!p_.hedging_condition()) {
        std::ostringstream os;
        os << "kappa-horizon-condition: kappa * T = " << p_.kappa * p_.horizon << " must be < pi/4";
        fail(ErrorKind::NotApplicable, os.str());
    }
}

ClosedForms::Trig ClosedForms::trig(double tau) const {
    require(std::isfinite(tau) && tau >= 0.0, "remaining time must be >= 0");
    require(p_.kappa * tau < std::numbers::pi / 4.0, "kappa-horizon-condition: kappa * tau must be < pi/4");
    const double k = p_.kappa;
    const double x = k * tau;
    Trig t{};
    t.cos = std::cos(x);
    t.sin = std::sin(x);
    t.sin_over_kappa = k == 0.0 ? tau : t.sin / k;
    double h = std::sin(0.5 * x);
    t.one_minus_cos = 2.0 * h * h;
    t.d = t.cos - t.sin;
    return t;
}

double ClosedForms::a(double tau) const { return 0.5 + 1.0 / trig(tau).d; }

double ClosedForms::b(double tau) const {
    Trig t = trig(tau);
    return (t.cos + t.sin) / t.d;
}

double ClosedForms::f0(double tau) const {
    Trig t = trig(tau);
    const double k = p_.kappa, al = p_.alpha, s2 = p_.sigma * p_.sigma;
    // -alpha + alpha / D written as alpha (1 - D) / D to avoid cancellation.
    double alpha_part = al * (t.one_minus_cos + t.sin) / t.d;
    double sin_part = (al * al * k * t.sin / s2 + 0.5 * s2 * t.sin_over_kappa) / t.d;
    return alpha_part - (0.5 * k + 0.25 * s2) * tau - 0.5 * std::log(t.d) + sin_part;
}

double ClosedForms::f1(double tau) const {
    Trig t = trig(tau);
    const double k = p_.kappa, s2 = p_.sigma * p_.sigma;
    return (-t.one_minus_cos - (2.0 * k * p_.alpha / s2 + 1.0) * t.sin) / t.d;
}

double ClosedForms::f2(double tau) const {
    Trig t = trig(tau);
    return p_.kappa * t.sin / (p_.sigma * p_.sigma * t.d);
}

double ClosedForms::investment_ratio(double tau, double y) const {
    Trig t = trig(tau);
    double bt = (t.cos + t.sin) / t.d;
    return 1.0 / t.d - 0.5 + p_.kappa / (p_.sigma * p_.sigma) * (p_.alpha - y) * bt;
}

double ClosedForms::z_ratio(double t, double y) const {
    require_finite(t, "time");
    require_finite(y, "log-price");
    double tau = p_.horizon - t;
    if (tau < 0.0 && tau > -1e-12 * p_.horizon) tau = 0.0;
    require(tau >= 0.0, "time must not exceed the horizon");
    double v = std::exp(-f0(tau) - f1(tau) * y - f2(tau) * y * y);
    if (!(v >= 0.0 && v <= 1.0 + 1e-9)) {
        std::ostringstream os;
        os << "Z_t/Z_t^M = " << v << " outside [0, 1] at t=" << t << ", y=" << y;
        fail(ErrorKind::InternalConsistency, os.str());
    }
    return std::min(v, 1.0);
}

double ClosedForms::z0m() const {
    const double T = p_.horizon, y = p_.y0();
    double v = std::exp(f0(T) + f1(T) * y + f2(T) * y * y);
    if (!(v > 1.0)) {
        std::ostringstream os;
        os << "Z_0^M = " << v << " must exceed 1";
        fail(ErrorKind::InternalConsistency, os.str());
    }
    return v;
}

} // namespace nvhedge
