#pragma once

#include <riskbound/risk.hpp>

#include <string>
#include <utility>
#include <vector>

namespace riskbound {

/// sup_x |F_X(x) - F_Y(x)| <= epsilon.
struct UniformEnvelope {
    double epsilon;
};

/**
 * Interval containing the support of both the target and the reference
 * variable. The uniform bounds substitute these for quantiles that fall
 * outside [0, 1], so they must cover the target too.
 */
struct SupportBounds {
    double inf;
    double sup;
};

/**
 * Right-continuous non-decreasing step function g >= 0 with g = 0 left of the
 * first breakpoint. Breakpoints are strictly increasing in x.
 */
class PointwiseEnvelope {
public:
    PointwiseEnvelope() = default;
    explicit PointwiseEnvelope(std::vector<std::pair<double, double>> breakpoints);

    static PointwiseEnvelope zero() { return {}; }
    /// g(x) = c for x >= x0.
    static PointwiseEnvelope step(double x0, double c);

    double operator()(double x) const;
    const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }
    double max_value() const { return points_.empty() ? 0.0 : points_.back().second; }

private:
    std::vector<std::pair<double, double>> points_;
};

enum class UpperCase { Shifted, Saturated };
enum class LowerCase { Shifted, Saturated };

/// Shifted when epsilon < alpha.
UpperCase upper_case(double alpha, double epsilon);
/// Shifted when epsilon + alpha < 1.
LowerCase lower_case(double alpha, double epsilon);
std::string to_string(UpperCase c);
std::string to_string(LowerCase c);

/// Upper bound on CVaR_alpha(X) given CVaRs of Y and a uniform CDF envelope.
double uniform_upper(const DiscreteDistribution& y, double alpha, UniformEnvelope env, SupportBounds support);
/// Lower bound on CVaR_alpha(X) given CVaRs of Y and a uniform CDF envelope.
double uniform_lower(const DiscreteDistribution& y, double alpha, UniformEnvelope env, SupportBounds support);

/// Distribution with CDF min(1, F_Y + g).
DiscreteDistribution dominated_cdf(const DiscreteDistribution& y, const PointwiseEnvelope& g);

/// CVaR of the dominated distribution; a lower bound whenever F_X <= F_Y + g.
double tight_lower(const DiscreteDistribution& y, const PointwiseEnvelope& g, double alpha);

/// Cumulative sum of non-negative point masses located at the given x values.
PointwiseEnvelope density_envelope_to_g(std::vector<std::pair<double, double>> masses);

/// (1/alpha) * integral over [1-alpha, 1] of inf{z : F_Y(z) + g(z) >= tau}.
double raw_quantile_lower(const DiscreteDistribution& y, const PointwiseEnvelope& g, double alpha);
/// (1/alpha) * integral over [1-alpha, 1] of inf{z : F_Y(z) - g(z) >= tau}.
/// Throws UndefinedBound when F_Y - g never reaches 1.
double raw_quantile_upper(const DiscreteDistribution& y, const PointwiseEnvelope& g, double alpha);

} // namespace riskbound
