#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nvhedge {

/// Empirical distribution of the market size over a fixed sample. All partial
/// expectations are sample-exact and O(log n) via prefix sums.
class EmpiricalDist {
public:
    EmpiricalDist() = default;
    explicit EmpiricalDist(std::vector<double> samples);

    std::size_t size() const { return sorted_.size(); }
    std::span<const double> sorted_samples() const { return sorted_; }
    double min() const { return sorted_.front(); }
    double max() const { return sorted_.back(); }
    double mean() const { return mean_; }
    double stddev() const; // population

    /// Number of samples <= a.
    std::size_t count_le(double a) const;
    /// Number of samples < a.
    std::size_t count_lt(double a) const;

    /// F(a) = P(A <= a).
    double cdf(double a) const;
    /// P(A >= a).
    double survival_ge(double a) const;
    /// Smallest sample x with F(x) >= p; p <= 0 gives the minimum.
    double quantile(double p) const;

    /// E[A 1{A <= a}].
    double partial_mean(double a) const;
    /// E[min(R, A)].
    double expected_min(double r) const;
    /// E[(R - A)^+].
    double expected_overage(double r) const;
    /// Var[(R - A)^+].
    double overage_variance(double r) const;
    /// E[(-A)^+].
    double expected_negative_part() const;

private:
    std::vector<double> sorted_;
    std::vector<double> prefix_;    // prefix sums of (a - shift)
    std::vector<double> prefix_sq_; // prefix sums of (a - shift)^2
    double shift_ = 0.0;
    double mean_ = 0.0;
};

} // namespace nvhedge
