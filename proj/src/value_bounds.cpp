#include <riskbound/errors.hpp>
#include <riskbound/value_bounds.hpp>

#include <algorithm>

namespace riskbound {

namespace {

constexpr double sandwich_tol = 1e-9;

} // namespace

ExactOracle::ExactOracle(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query,
                         EnvelopeOptions opts, std::size_t budget)
    : pair_(pair),
      k_(query.k),
      original_(enumerate_return_distribution(pair, policy, query, ModelKind::Original, budget)),
      simplified_(enumerate_return_distribution(pair, policy, query, ModelKind::Simplified, budget)),
      expectations_(enumerate_trajectory_expectations(pair, policy, query, {}, opts, budget))
{}

SupportBounds ExactOracle::support() const {
    const double s = pair_.return_span(k_);
    return {-s, s};
}

SupportBounds ExactOracle::tightened_support() const {
    double lo = pair_.original.cost[0][0], hi = lo;
    for (const auto& row : pair_.original.cost)
        for (double c : row) {
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    const double steps = static_cast<double>(pair_.horizon_T - k_);
    const double c0 = expectations_.root_cost;
    return {c0 + steps * lo, c0 + steps * hi};
}

double ExactOracle::q(double alpha) const { return cvar_exact(original_, alpha); }
double ExactOracle::q_simplified(double alpha) const { return cvar_exact(simplified_, alpha); }

UniformValueBounds ExactOracle::uniform(double alpha, bool tightened) const {
    const auto s = tightened ? tightened_support() : support();
    const UniformEnvelope env{epsilon()};
    return {uniform_lower(simplified_, alpha, env, s), uniform_upper(simplified_, alpha, env, s), epsilon(),
            lower_case(alpha, epsilon()), upper_case(alpha, epsilon()), s};
}

double ExactOracle::tight_lower(double alpha) const {
    return riskbound::tight_lower(simplified_, expectations_.envelope, alpha);
}

double ExactOracle::tight_lower_on_grid(double alpha, const BinGrid& grid) const {
    std::vector<double> v;
    v.reserve(grid.edges().size());
    for (double e : grid.edges()) v.push_back(expectations_.envelope(e));
    BinnedEnvelope h(grid, std::move(v));
    return riskbound::tight_lower(simplified_, h.upper_envelope(), alpha);
}

BoundReport ExactOracle::report(double alpha) const {
    BoundReport r{};
    r.alpha = alpha;
    r.q_original = q(alpha);
    r.q_simplified = q_simplified(alpha);
    r.epsilon = epsilon();
    r.uniform = uniform(alpha, false);
    r.uniform_tightened = uniform(alpha, true);
    r.tight_lower = tight_lower(alpha);
    r.sandwich_ok = r.uniform.lower <= r.q_original + sandwich_tol && r.q_original <= r.uniform.upper + sandwich_tol &&
                    r.uniform_tightened.lower <= r.q_original + sandwich_tol &&
                    r.q_original <= r.uniform_tightened.upper + sandwich_tol &&
                    r.tight_lower <= r.q_original + sandwich_tol;
    return r;
}

double q_exact(const SimplifiedPair& pair, const Policy& policy, const ValueQuery& query, ModelKind model) {
    return cvar_exact(enumerate_return_distribution(pair, policy, query.tree(), model), query.alpha);
}

UniformValueBounds q_bounds_uniform(const SimplifiedPair& pair, const Policy& policy, const ValueQuery& query,
                                    EnvelopeOptions opts, bool tightened) {
    return ExactOracle(pair, policy, query.tree(), opts).uniform(query.alpha, tightened);
}

double q_lower_tight(const SimplifiedPair& pair, const Policy& policy, const ValueQuery& query, EnvelopeOptions opts) {
    return ExactOracle(pair, policy, query.tree(), opts).tight_lower(query.alpha);
}

BoundReport bound_report(const SimplifiedPair& pair, const Policy& policy, const ValueQuery& query,
                         EnvelopeOptions opts) {
    return ExactOracle(pair, policy, query.tree(), opts).report(query.alpha);
}

} // namespace riskbound
