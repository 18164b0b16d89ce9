#include "nvhedge/empirical.hpp"

#include "nvhedge/error.hpp"

#include <algorithm>
#include <cmath>

namespace nvhedge {

EmpiricalDist::EmpiricalDist(std::vector<double> samples) : sorted_(std::move(samples)) {
    require(!sorted_.empty(), "empirical distribution needs at least one sample");
    for (double a : sorted_) require_finite(a, "market-size sample");
    std::sort(sorted_.begin(), sorted_.end());
    const std::size_t n = sorted_.size();
    double sum = 0.0;
    for (double a : sorted_) sum += a;
    mean_ = sum / static_cast<double>(n);
    shift_ = mean_;
    prefix_.assign(n + 1, 0.0);
    prefix_sq_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double d = sorted_[i] - shift_;
        prefix_[i + 1] = prefix_[i] + d;
        prefix_sq_[i + 1] = prefix_sq_[i] + d * d;
    }
}

double EmpiricalDist::stddev() const {
    const double n = static_cast<double>(size());
    double m = prefix_.back() / n;
    return std::sqrt(std::max(0.0, prefix_sq_.back() / n - m * m));
}

std::size_t EmpiricalDist::count_le(double a) const {
    return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), a) - sorted_.begin());
}

std::size_t EmpiricalDist::count_lt(double a) const {
    return static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), a) - sorted_.begin());
}

double EmpiricalDist::cdf(double a) const { return static_cast<double>(count_le(a)) / static_cast<double>(size()); }

double EmpiricalDist::survival_ge(double a) const {
    return static_cast<double>(size() - count_lt(a)) / static_cast<double>(size());
}

double EmpiricalDist::quantile(double p) const {
    const std::size_t n = size();
    if (!(p > 0.0)) return sorted_.front();
    if (p >= 1.0) return sorted_.back();
    double scaled = p * static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(scaled - 1e-12 * scaled));
    k = std::clamp<std::size_t>(k, 1, n);
    return sorted_[k - 1];
}

double EmpiricalDist::partial_mean(double a) const {
    std::size_t k = count_le(a);
    const double n = static_cast<double>(size());
    return (prefix_[k] + shift_ * static_cast<double>(k)) / n;
}

double EmpiricalDist::expected_overage(double r) const {
    std::size_t k = count_le(r);
    const double n = static_cast<double>(size());
    // sum_{a <= r} (r - a) = k (r - shift) - sum (a - shift)
    return (static_cast<double>(k) * (r - shift_) - prefix_[k]) / n;
}

double EmpiricalDist::expected_min(double r) const { return r - expected_overage(r); }

double EmpiricalDist::overage_variance(double r) const {
    std::size_t k = count_le(r);
    const double n = static_cast<double>(size());
    double u = r - shift_;
    double kd = static_cast<double>(k);
    double second = (kd * u * u - 2.0 * u * prefix_[k] + prefix_sq_[k]) / n;
    double first = expected_overage(r);
    return std::max(0.0, second - first * first);
}

double EmpiricalDist::expected_negative_part() const {
    std::size_t k = count_lt(0.0);
    return -(prefix_[k] + shift_ * static_cast<double>(k)) / static_cast<double>(size());
}

} // namespace nvhedge
