#include <riskbound/bounds.hpp>
#include <riskbound/errors.hpp>

#include <algorithm>
#include <cmath>

namespace riskbound {

namespace {

void check_support(SupportBounds s) {
    if (!std::isfinite(s.inf) || !std::isfinite(s.sup) || s.inf > s.sup)
        throw InvalidArgument("support bounds must be finite with inf <= sup");
}

void check_epsilon(double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidEnvelope("epsilon must be finite and non-negative");
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
}

// Sorted union of the atoms of y and the breakpoints of g.
std::vector<double> merged_grid(const DiscreteDistribution& y, const PointwiseEnvelope& g) {
    std::vector<double> grid(y.values());
    for (const auto& [x, v] : g.breakpoints()) grid.push_back(x);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// Values of F_Y + sign * g on the merged grid.
std::vector<double> shifted_cdf(const DiscreteDistribution& y, const PointwiseEnvelope& g,
                                const std::vector<double>& grid, double sign) {
    std::vector<double> out;
    out.reserve(grid.size());
    std::size_t j = 0;
    double fy = 0.0;
    for (double z : grid) {
        while (j < y.size() && y.values()[j] <= z) fy += y.probs()[j++];
        out.push_back(fy + sign * g(z));
    }
    return out;
}

double raw_quantile(const DiscreteDistribution& y, const PointwiseEnvelope& g, double alpha, double sign) {
    check_alpha(alpha);
    auto grid = merged_grid(y, g);
    auto G = shifted_cdf(y, g, grid, sign);
    const double lo = 1.0 - alpha;
    double prev = 0.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double cur = std::min(1.0, std::max(prev, G[j]));
        if (sign > 0 && cur >= 1.0 - 1e-12) cur = 1.0;
        double a = std::max(prev, lo);
        if (cur > a) acc += grid[j] * (cur - a);
        prev = cur;
    }
    if (prev < 1.0 - 1e-12) throw UndefinedBound("F_Y - g never reaches one; quantile bound is undefined");
    if (prev < 1.0) acc += grid.back() * (1.0 - std::max(prev, lo));
    return acc / alpha;
}

} // namespace

PointwiseEnvelope::PointwiseEnvelope(std::vector<std::pair<double, double>> breakpoints)
    : points_(std::move(breakpoints)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& [x, v] = points_[i];
        if (!std::isfinite(x) || !std::isfinite(v)) throw InvalidEnvelope("non-finite breakpoint");
        if (v < 0.0) throw InvalidEnvelope("envelope values must be non-negative");
        if (i > 0 && !(x > points_[i - 1].first)) throw InvalidEnvelope("breakpoints must be strictly increasing");
        if (i > 0 && v < points_[i - 1].second) throw InvalidEnvelope("envelope must be non-decreasing");
    }
}

PointwiseEnvelope PointwiseEnvelope::step(double x0, double c) { return PointwiseEnvelope({{x0, c}}); }

double PointwiseEnvelope::operator()(double x) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), x,
                               [](double v, const std::pair<double, double>& p) { return v < p.first; });
    if (it == points_.begin()) return 0.0;
    return std::prev(it)->second;
}

UpperCase upper_case(double alpha, double epsilon) {
    return epsilon < alpha ? UpperCase::Shifted : UpperCase::Saturated;
}

LowerCase lower_case(double alpha, double epsilon) {
    return epsilon + alpha < 1.0 ? LowerCase::Shifted : LowerCase::Saturated;
}

std::string to_string(UpperCase c) { return c == UpperCase::Shifted ? "shifted" : "saturated"; }
std::string to_string(LowerCase c) { return c == LowerCase::Shifted ? "shifted" : "saturated"; }

double uniform_upper(const DiscreteDistribution& y, double alpha, UniformEnvelope env, SupportBounds support) {
    check_alpha(alpha);
    check_epsilon(env.epsilon);
    check_support(support);
    const double eps = env.epsilon;
    if (upper_case(alpha, eps) == UpperCase::Saturated) return support.sup;
    return ((alpha - eps) / alpha) * cvar_exact(y, alpha - eps) + (eps / alpha) * support.sup;
}

double uniform_lower(const DiscreteDistribution& y, double alpha, UniformEnvelope env, SupportBounds support) {
    check_alpha(alpha);
    check_epsilon(env.epsilon);
    check_support(support);
    const double eps = env.epsilon;
    // eps * CVaR_eps(Y), extended past eps = 1 with the support infimum
    const double tail = upper_tail_integral(y, eps, support.inf);
    if (lower_case(alpha, eps) == LowerCase::Shifted)
        return ((alpha + eps) / alpha) * cvar_exact(y, alpha + eps) - tail / alpha;
    return ((alpha + eps - 1.0) * support.inf + y.mean() - tail) / alpha;
}

DiscreteDistribution dominated_cdf(const DiscreteDistribution& y, const PointwiseEnvelope& g) {
    auto grid = merged_grid(y, g);
    auto G = shifted_cdf(y, g, grid, 1.0);
    std::vector<std::pair<double, double>> atoms;
    double prev = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double cur = std::min(1.0, G[j]);
        if (cur > prev) atoms.emplace_back(grid[j], cur - prev);
        prev = cur;
        if (cur >= 1.0) break;
    }
    return DiscreteDistribution(std::move(atoms));
}

double tight_lower(const DiscreteDistribution& y, const PointwiseEnvelope& g, double alpha) {
    return cvar_exact(dominated_cdf(y, g), alpha);
}

PointwiseEnvelope density_envelope_to_g(std::vector<std::pair<double, double>> masses) {
    for (const auto& [x, m] : masses)
        if (!(m >= 0.0) || !std::isfinite(x)) throw InvalidEnvelope("point masses must be non-negative");
    std::sort(masses.begin(), masses.end());
    std::vector<std::pair<double, double>> points;
    double acc = 0.0;
    for (const auto& [x, m] : masses) {
        acc += m;
        if (!points.empty() && points.back().first == x)
            points.back().second = acc;
        else
            points.emplace_back(x, acc);
    }
    return PointwiseEnvelope(std::move(points));
}

double raw_quantile_lower(const DiscreteDistribution& y, const PointwiseEnvelope& g, double alpha) {
    return raw_quantile(y, g, alpha, 1.0);
}

double raw_quantile_upper(const DiscreteDistribution& y, const PointwiseEnvelope& g, double alpha) {
    return raw_quantile(y, g, alpha, -1.0);
}

} // namespace riskbound
