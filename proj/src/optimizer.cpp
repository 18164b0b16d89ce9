#include "nvhedge/optimizer.hpp"

#include "nvhedge/error.hpp"
#include "nvhedge/search.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nvhedge {

const char* to_string(Impact impact) noexcept {
    switch (impact) {
    case Impact::Positive: return "positive";
    case Impact::Negative: return "negative";
    case Impact::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

NvSolution risk_neutral_newsvendor(const EmpiricalDist& dist_m, const DemandParams& demand) {
    return solve_newsvendor(dist_m, demand);
}

FrontierPoint HedgeOptimum::frontier_point() const {
    FrontierPoint pt;
    pt.m = m;
    pt.p = decision.p;
    pt.r = decision.r;
    pt.q = q;
    pt.risk = std::sqrt(breakdown.total);
    pt.breakdown = breakdown;
    pt.production_share = production_share;
    return pt;
}

HedgeOptimizer::HedgeOptimizer(const HedgingModel& model, OptimizerOptions opts)
    : model_(model), opts_(opts), nv_(solve_newsvendor(model.real_dist(), model.demand())),
      nvm_(risk_neutral_newsvendor(model.rn_dist(), model.demand())) {
    require(opts_.r_grid >= 3, "R grid needs at least 3 points");
    require(opts_.r_tol_rel > 0.0 && opts_.p_tol_rel > 0.0, "search tolerances must be > 0");
}

double HedgeOptimizer::unhedgeable_factor(double r) const {
    auto it = cache_.find(r);
    if (it == cache_.end()) it = cache_.emplace(r, model_.engine().unhedgeable_factor(r)).first;
    return it->second.value;
}

double HedgeOptimizer::price_cap(double m, double r) const {
    const auto& d = model_.demand();
    require(r >= d.b * d.c * (1.0 - 1e-12), "vpq must be >= b * c");
    const double e = model_.rn_dist().expected_overage(r);
    // V0(P) = -b P^2 + k P - C, concave in P
    const double k = r + d.b * d.c - e;
    const double cst = d.c * r - d.s * e + m;
    const double p_max = k / (2.0 * d.b);
    const double disc = k * k - 4.0 * d.b * cst;
    double cap = disc <= 0.0 ? p_max : 2.0 * cst / (k + std::sqrt(disc));
    // Q = R - bP must stay nonnegative
    return std::clamp(cap, d.c, std::max(d.c, std::min(p_max, r / d.b)));
}

std::pair<double, double> HedgeOptimizer::best_price(double m, double r) const {
    const auto& d = model_.demand();
    const double e = model_.rn_dist().expected_overage(r);
    const double u = unhedgeable_factor(r);
    const double denom = model_.z0m() - 1.0;
    auto objective = [&](double p) {
        double v0 = (p - d.c) * (r - d.b * p) - (p - d.s) * e;
        double gap = m - v0;
        double noise = d.sigma_tilde * (p - d.s);
        return gap * gap / denom + noise * noise * u;
    };
    const double cap = price_cap(m, r);
    if (!(cap > d.c)) return {d.c, objective(d.c)};
    auto best = golden_section(objective, d.c, cap, opts_.p_tol_rel * d.c, opts_.tie_rel);
    // the bracket ends are admissible too
    for (double end : {d.c, cap}) {
        double v = objective(end);
        if (v < best.value - opts_.tie_rel * std::abs(best.value) ||
            (v <= best.value + opts_.tie_rel * std::abs(best.value) && end < best.x)) {
            best.value = v;
            best.x = end;
        }
    }
    return {best.x, best.value};
}

namespace {

struct OuterValue {
    double b = 0.0;
    double p = 0.0;
};

} // namespace

HedgeOptimum HedgeOptimizer::minimize_B(double m) const {
    require_finite(m, "target return");
    require(m > 0.0, "target return must be > 0");
    const auto& d = model_.demand();
    const double lo = d.b * d.c;
    const double hi = nvm_.r;
    if (!(hi > lo * (1.0 + 1e-12))) fail(ErrorKind::DegenerateInput, "VPQ search interval [bc, R^NV(M)] is empty");

    const std::size_t before = cache_.size();
    const double abs_tie = 1e-12 * m * m;
    auto better = [&](const OuterValue& u, const OuterValue& v) {
        double tol = opts_.tie_rel * std::max(std::abs(u.b), std::abs(v.b)) + abs_tie;
        if (u.b < v.b - tol) return true;
        if (u.b > v.b + tol) return false;
        return u.p < v.p * (1.0 - 1e-12);
    };
    auto outer = [&](double r) {
        auto [p, b] = best_price(m, r);
        return OuterValue{b, p};
    };

    const int n = opts_.r_grid;
    std::vector<double> grid(n);
    std::vector<OuterValue> vals(n);
    int best = 0;
    for (int k = 0; k < n; ++k) {
        grid[k] = lo + (hi - lo) * k / (n - 1);
        vals[k] = outer(grid[k]);
        if (better(vals[k], vals[best])) best = k;
    }
    double r_best = grid[best];
    OuterValue v_best = vals[best];
    const double a = grid[std::max(0, best - 1)], b = grid[std::min(n - 1, best + 1)];
    auto refined = golden_section_by(outer, a, b, opts_.r_tol_rel * hi, better);
    if (better(refined.value, v_best)) {
        r_best = refined.x;
        v_best = refined.value;
    }

    HedgeOptimum out;
    out.m = m;
    out.decision = {v_best.p, r_best};
    out.q = r_best - d.b * v_best.p;
    out.v0 = model_.v0(out.decision);
    out.v0_se = model_.v0_se(out.decision);
    const MeanWithError& u = cache_.at(r_best);
    const double noise = d.sigma_tilde * (v_best.p - d.s);
    out.breakdown = VarianceBreakdown::make(model_.investment_sq(m, out.decision), noise * noise * u.value,
                                            noise * noise * u.standard_error);
    out.production_share = out.v0 / m;
    out.evaluations = static_cast<int>(cache_.size() - before);
    return out;
}

std::vector<HedgeOptimum> HedgeOptimizer::efficient_frontier(std::span<const double> m_grid) const {
    require(!m_grid.empty(), "m grid must not be empty");
    std::vector<double> ms(m_grid.begin(), m_grid.end());
    for (double m : ms) {
        require_finite(m, "target return");
        require(m > 0.0, "target return must be > 0");
    }
    require(std::is_sorted(ms.begin(), ms.end()), "m grid must be sorted ascending");
    std::vector<HedgeOptimum> out;
    out.reserve(ms.size());
    for (double m : ms) out.push_back(minimize_B(m));
    for (std::size_t k = 1; k < out.size(); ++k) {
        double prev = out[k - 1].breakdown.total, cur = out[k].breakdown.total;
        if (cur < prev * (1.0 - 1e-6)) {
            std::ostringstream os;
            os << "hedging frontier risk decreased between m=" << out[k - 1].m << " and m=" << out[k].m;
            fail(ErrorKind::InternalConsistency, os.str());
        }
    }
    return out;
}

double r_circ_lhs(const EmpiricalDist& dist_m, double r) {
    double tail = dist_m.survival_ge(r);
    if (!(tail > 0.0)) fail(ErrorKind::NumericalFailure, "P^M(A >= R) vanishes on the sample");
    return dist_m.partial_mean(r) / tail;
}

HurtingCondition hurting_condition(const EmpiricalDist& dist_m, const NvSolution& nv, const DemandParams& demand) {
    HurtingCondition h;
    h.p_circ = best_price_for(dist_m, nv.r, demand);
    h.r_ratio = (h.p_circ - demand.s) / (nv.p - demand.s);
    if (h.r_ratio < 1.0 - 1e-3) {
        std::ostringstream os;
        os << "r_circ = " << h.r_ratio << " < 1 contradicts a negative asset-price impact";
        fail(ErrorKind::InternalConsistency, os.str());
    }
    double r = std::max(h.r_ratio, 1.0);
    h.lhs = (nv.p - demand.s) / (r + std::sqrt(r * r - 1.0)) * dist_m.survival_ge(nv.r);
    h.rhs = demand.c - demand.s;
    h.satisfied = h.lhs <= h.rhs;
    return h;
}

double compute_r_circ(const EmpiricalDist& dist_m, const NvSolution& nv, const DemandParams& demand) {
    HurtingCondition h = hurting_condition(dist_m, nv, demand);
    if (h.satisfied) fail(ErrorKind::NotApplicable, "hurting condition holds; R_circ is not needed");
    const double b = demand.b, c = demand.c, s = demand.s;
    const double r = std::max(h.r_ratio, 1.0);
    const double pbar_nv = nv.p - s, pbar_circ = h.p_circ - s;
    const double target =
        pbar_nv * (2.0 * b * pbar_circ + 2.0 * b * s - b * c) / ((c - s) * (r + std::sqrt(r * r - 1.0))) - nv.r;
    const NvSolution nvm = risk_neutral_newsvendor(dist_m, demand);
    double lo = nv.r, hi = std::max(nv.r, nvm.r);
    if (r_circ_lhs(dist_m, lo) >= target) return lo;
    if (r_circ_lhs(dist_m, hi) < target) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (r_circ_lhs(dist_m, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

bool BoundsReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed; });
}

BoundsReport check_bounds(const HedgeOptimizer& opt, const HedgeOptimum& h, Impact impact, double r_tol) {
    const auto& model = opt.model();
    const auto& demand = model.demand();
    BoundsReport rep;
    rep.impact = impact;
    rep.m = h.m;
    rep.p_nv = opt.nv_real().p;
    rep.r_nv = opt.nv_real().r;
    rep.p_nvm = opt.nv_risk_neutral().p;
    rep.r_nvm = opt.nv_risk_neutral().r;
    rep.p_h = h.decision.p;
    rep.r_h = h.decision.r;
    rep.v0_h = h.v0;
    rep.v0_h_se = h.v0_se;
    const double p_tol = 1e-6 * demand.c;

    auto add = [&](const char* name, double value, double bound) {
        rep.checks.push_back({name, value <= bound, value, bound});
    };
    if (impact != Impact::Inconclusive) add("P^h <= P^NV", rep.p_h, rep.p_nv + p_tol);
    add("P^h <= P^NV(M)", rep.p_h, rep.p_nvm + p_tol);
    add("R^h <= R^NV(M)", rep.r_h, rep.r_nvm + r_tol);
    add("V0(P^h,R^h) <= m + 2 SE", rep.v0_h, rep.m + 2.0 * rep.v0_h_se);
    if (impact == Impact::Positive) add("R^h <= R^NV", rep.r_h, rep.r_nv + r_tol);
    if (impact == Impact::Negative) {
        rep.hurt = hurting_condition(model.rn_dist(), opt.nv_real(), demand);
        if (rep.hurt->satisfied) {
            add("R^h <= R^NV", rep.r_h, rep.r_nv + r_tol);
        } else {
            rep.r_circ = compute_r_circ(model.rn_dist(), opt.nv_real(), demand);
            add("R^h <= R_circ", rep.r_h, *rep.r_circ + r_tol);
        }
    }
    return rep;
}

} // namespace nvhedge
