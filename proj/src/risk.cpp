#include <riskbound/errors.hpp>
#include <riskbound/risk.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace riskbound {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidArgument("confidence level must lie in (0, 1), got " + std::to_string(alpha));
}

// Mass-weighted sum of the largest `mass` of the distribution, mass in [0, 1].
double top_mass_sum(const DiscreteDistribution& d, double mass) {
    double remaining = mass;
    double acc = 0.0;
    const auto& v = d.values();
    const auto& p = d.probs();
    for (std::size_t j = v.size(); j-- > 0 && remaining > 0.0;) {
        double take = std::min(p[j], remaining);
        acc += v[j] * take;
        remaining -= take;
    }
    // probabilities may sum to slightly less than one
    if (remaining > 0.0) acc += remaining * v.front();
    return acc;
}

} // namespace

ConfidenceLevel::ConfidenceLevel(double alpha) : alpha_(alpha) { check_alpha(alpha); }

DiscreteDistribution::DiscreteDistribution(std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty()) throw InvalidArgument("distribution needs at least one atom");
    for (const auto& [v, p] : atoms) {
        if (!std::isfinite(v) || !std::isfinite(p)) throw InvalidArgument("non-finite atom");
        if (p < 0.0) throw InvalidArgument("negative probability " + std::to_string(p));
    }
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    double total = 0.0;
    for (const auto& [v, p] : atoms) {
        total += p;
        if (p == 0.0) continue;
        if (!values_.empty() &&
            std::abs(v - values_.back()) <= atom_merge_tol * std::max({1.0, std::abs(v), std::abs(values_.back())})) {
            probs_.back() += p;
        } else {
            values_.push_back(v);
            probs_.push_back(p);
        }
    }
    if (values_.empty() || std::abs(total - 1.0) > 1e-12)
        throw InvalidArgument("probabilities must sum to one, got " + std::to_string(total));
}

DiscreteDistribution DiscreteDistribution::uniform(std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("empty sample");
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(values.size());
    double w = 1.0 / static_cast<double>(values.size());
    for (double v : values) atoms.emplace_back(v, w);
    // 1/n summed n times can drift by a few ulps; rescale the merged masses
    std::sort(atoms.begin(), atoms.end());
    std::vector<std::pair<double, double>> merged;
    for (std::size_t i = 0; i < atoms.size();) {
        std::size_t j = i;
        while (j < atoms.size() && atoms[j].first == atoms[i].first) ++j;
        merged.emplace_back(atoms[i].first, static_cast<double>(j - i) * w);
        i = j;
    }
    return DiscreteDistribution(std::move(merged));
}

double DiscreteDistribution::cdf(double x) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < values_.size() && values_[j] <= x; ++j) acc += probs_[j];
    return std::min(acc, 1.0);
}

double DiscreteDistribution::mean() const {
    double acc = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) acc += values_[j] * probs_[j];
    return acc;
}

double DiscreteDistribution::min() const { return values_.front(); }
double DiscreteDistribution::max() const { return values_.back(); }

double cvar_exact(const DiscreteDistribution& dist, double alpha) {
    check_alpha(alpha);
    return top_mass_sum(dist, alpha) / alpha;
}

double upper_tail_integral(const DiscreteDistribution& dist, double mass, double floor) {
    if (mass < 0.0 || !std::isfinite(mass)) throw InvalidArgument("tail mass must be non-negative");
    if (mass == 0.0) return 0.0;
    if (mass <= 1.0) return top_mass_sum(dist, mass);
    return dist.mean() + (mass - 1.0) * floor;
}

double var_exact(const DiscreteDistribution& dist, double alpha) {
    check_alpha(alpha);
    double best = dist.values().front();
    double cum = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
        cum += dist.probs()[j];
        if (cum <= 1.0 - alpha + 1e-12)
            best = dist.values()[j];
        else
            break;
    }
    return best;
}

double cvar_estimate_presorted(std::span<const double> x, double alpha) {
    check_alpha(alpha);
    if (x.empty()) throw InvalidArgument("empty sample");
    const double n = static_cast<double>(x.size());
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        double w = static_cast<double>(i) / n - (1.0 - alpha);
        if (w > 0.0) acc += (x[i] - x[i - 1]) * w;
    }
    return x.back() - acc / alpha;
}

double cvar_estimate_sorted(std::span<const double> sample, double alpha) {
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    return cvar_estimate_presorted(x, alpha);
}

double cvar_estimate_counts(std::span<const double> values, std::span<const std::uint64_t> counts, double alpha) {
    check_alpha(alpha);
    if (values.size() != counts.size()) throw InvalidArgument("values and counts differ in length");
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw InvalidArgument("empty sample");
    const double n = static_cast<double>(total);
    // increments X(i+1) - X(i) are non-zero only where the value changes
    double acc = 0.0, last = 0.0;
    std::uint64_t below = 0;
    bool seen = false;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (counts[j] == 0) continue;
        if (seen) {
            if (!(values[j] > last)) throw InvalidArgument("values must be strictly increasing");
            double w = static_cast<double>(below) / n - (1.0 - alpha);
            if (w > 0.0) acc += (values[j] - last) * w;
        }
        seen = true;
        last = values[j];
        below += counts[j];
    }
    return last - acc / alpha;
}

double cvar_estimate_inf(std::span<const double> sample, double alpha) {
    check_alpha(alpha);
    if (sample.empty()) throw InvalidArgument("empty sample");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + x[i];
    double best = x.back();
    for (std::size_t j = 0; j < n; ++j) {
        double excess = suffix[j + 1] - static_cast<double>(n - j - 1) * x[j];
        best = std::min(best, x[j] + excess / (static_cast<double>(n) * alpha));
    }
    return best;
}

DeviationRadii brown_radii(std::size_t n, double alpha, double delta, double range) {
    check_alpha(alpha);
    if (n == 0) throw InvalidArgument("sample size must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
    if (!(range >= 0.0)) throw InvalidArgument("range must be non-negative");
    const double nn = static_cast<double>(n);
    return {range * std::sqrt(5.0 * std::log(3.0 / delta) / (alpha * nn)),
            (range / alpha) * std::sqrt(std::log(1.0 / delta) / (2.0 * nn))};
}

double sample_mean(std::span<const double> sample) {
    if (sample.empty()) throw InvalidArgument("empty sample");
    return std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(sample.size());
}

double cdf_sup_distance(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    std::size_t i = 0, j = 0;
    double fa = 0.0, fb = 0.0, best = 0.0;
    while (i < a.size() || j < b.size()) {
        double x = std::min(i < a.size() ? a.values()[i] : INFINITY, j < b.size() ? b.values()[j] : INFINITY);
        while (i < a.size() && a.values()[i] <= x) fa += a.probs()[i++];
        while (j < b.size() && b.values()[j] <= x) fb += b.probs()[j++];
        best = std::max(best, std::abs(fa - fb));
    }
    return best;
}

} // namespace riskbound
