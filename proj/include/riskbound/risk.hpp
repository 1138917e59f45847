#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace riskbound {

/// Risk level alpha in the open interval (0, 1).
class ConfidenceLevel {
public:
    explicit ConfidenceLevel(double alpha);
    double value() const { return alpha_; }
    operator double() const { return alpha_; }

private:
    double alpha_;
};

/// Tolerance under which two atom values are treated as the same point.
inline constexpr double atom_merge_tol = 1e-12;

/**
 * Finitely supported distribution of a cost. Atoms are kept sorted by value,
 * merged when values agree within atom_merge_tol, and all probabilities are
 * strictly positive and sum to one within 1e-12.
 */
class DiscreteDistribution {
public:
    DiscreteDistribution() = default;
    explicit DiscreteDistribution(std::vector<std::pair<double, double>> atoms);

    /// Uniform distribution over the given values (repeats add mass).
    static DiscreteDistribution uniform(std::span<const double> values);

    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    /// P(X <= x).
    double cdf(double x) const;
    double mean() const;
    double min() const;
    double max() const;

private:
    std::vector<double> values_;
    std::vector<double> probs_;
};

/// Radii of the two-sided concentration inequality for the sample CVaR.
struct DeviationRadii {
    double upper;
    double lower;
};

/// Mean of the worst (largest) alpha fraction of the mass.
double cvar_exact(const DiscreteDistribution& dist, double alpha);

/**
 * Integral of the upper quantile function over [1 - mass, 1]. For mass >= 1
 * the quantile below level zero is taken as `floor`, so the result is
 * E[X] + (mass - 1) * floor. Zero for mass == 0.
 */
double upper_tail_integral(const DiscreteDistribution& dist, double mass, double floor);

/// Largest support point v with F(v) <= 1 - alpha; the smallest atom if none.
double var_exact(const DiscreteDistribution& dist, double alpha);

/// Sample CVaR from order statistics. The sample need not be sorted.
double cvar_estimate_sorted(std::span<const double> sample, double alpha);

/// Same estimator on a sample already sorted ascending.
double cvar_estimate_presorted(std::span<const double> sorted, double alpha);

/**
 * The sorted-sample estimator on a sample given as distinct ascending values
 * with multiplicities; equal to cvar_estimate_presorted on the expanded sample.
 */
double cvar_estimate_counts(std::span<const double> values, std::span<const std::uint64_t> counts, double alpha);

/// Sample CVaR as min over sample points x of x + sum (X_i - x)^+ / (n alpha).
double cvar_estimate_inf(std::span<const double> sample, double alpha);

/// Radii for a sample of size n of a variable supported on an interval of width `range`.
DeviationRadii brown_radii(std::size_t n, double alpha, double delta, double range);

double sample_mean(std::span<const double> sample);

/// sup_x |F_a(x) - F_b(x)|.
double cdf_sup_distance(const DiscreteDistribution& a, const DiscreteDistribution& b);

} // namespace riskbound
