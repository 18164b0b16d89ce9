#pragma once

#include <cmath>
#include <functional>

namespace nvhedge {

template <class V>
struct LineMinimumOf {
    double x = 0.0;
    V value{};
    int evaluations = 0;
};

/// Golden-section search on [lo, hi] until the bracket is narrower than abs_tol.
/// better(u, v) says u is strictly preferable to v; otherwise the left point wins,
/// so near-ties resolve toward smaller x.
template <class F, class Better>
auto golden_section_by(F&& f, double lo, double hi, double abs_tol, Better&& better)
    -> LineMinimumOf<decltype(f(lo))> {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    LineMinimumOf<decltype(f(lo))> out;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    auto f1 = f(x1);
    auto f2 = f(x2);
    out.evaluations = 2;
    while (hi - lo > abs_tol) {
        if (!better(f2, f1)) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        ++out.evaluations;
    }
    if (!better(f2, f1)) {
        out.x = x1;
        out.value = f1;
    } else {
        out.x = x2;
        out.value = f2;
    }
    return out;
}

using LineMinimum = LineMinimumOf<double>;

/// Scalar form: values within tie_rel (relative) count as ties.
inline LineMinimum golden_section(const std::function<double(double)>& f, double lo, double hi, double abs_tol,
                                  double tie_rel = 1e-9) {
    return golden_section_by(f, lo, hi, abs_tol,
                             [tie_rel](double u, double v) { return u < v - tie_rel * std::abs(v); });
}

} // namespace nvhedge
