#include <riskbound/delta.hpp>
#include <riskbound/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace riskbound {

namespace {

std::uint64_t ceil_count(double x) {
    if (!(x < 1.8e19)) throw BudgetExceeded("required sample size does not fit in 64 bits");
    return x <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(x));
}

void check_sample_size_args(double v, double delta, double B, int terms) {
    if (!(v > 0.0)) throw InvalidArgument("v must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
    if (terms > 0 && (!(B > 0.0) || !std::isfinite(B))) throw InvalidArgument("importance bound must be positive and finite");
    if (terms < 0) throw InvalidArgument("number of terms must be non-negative");
}

std::size_t step_index(const std::vector<int>& depths, int depth) {
    auto it = std::lower_bound(depths.begin(), depths.end(), depth);
    return static_cast<std::size_t>(it - depths.begin());
}

/// count * weight * Delta-hat per atom, summing plug-in values draw by draw.
std::vector<double> atom_contributions(const ProposalQ0& q0, std::span<const std::uint64_t> counts, Rng* rng,
                                       const DeltaEstimator& delta_hat) {
    const auto& atoms = q0.atoms();
    if (counts.size() != atoms.size()) throw InvalidArgument("one count per proposal atom is required");
    std::vector<double> out(atoms.size(), 0.0);
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        if (counts[j] == 0) continue;
        double total_delta = 0.0;
        if (delta_hat) {
            for (std::uint64_t r = 0; r < counts[j]; ++r) total_delta += delta_hat(atoms[j], *rng);
        } else {
            total_delta = static_cast<double>(counts[j]) * atoms[j].node.tv;
        }
        out[j] = atoms[j].weight * total_delta;
    }
    return out;
}

double total_count(std::span<const std::uint64_t> counts) {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    if (n == 0) throw InvalidArgument("need at least one delta-belief draw");
    return static_cast<double>(n);
}

EpsilonEstimate epsilon_from_contributions(const ProposalQ0& q0, std::span<const std::uint64_t> counts,
                                           const std::vector<double>& contrib) {
    EpsilonEstimate est;
    est.per_step.assign(q0.depths().size(), 0.0);
    if (q0.atoms().empty()) return est;
    const double n = total_count(counts);
    est.n_delta = static_cast<std::uint64_t>(n);
    for (std::size_t j = 0; j < contrib.size(); ++j)
        est.per_step[step_index(q0.depths(), q0.atoms()[j].node.depth)] += contrib[j];
    for (double& m : est.per_step) {
        m /= n;
        est.epsilon += m;
    }
    return est;
}

std::vector<double> g_from_contributions(const ProposalQ0& q0, std::span<const std::uint64_t> counts,
                                         const std::vector<double>& contrib, std::span<const double> grid) {
    std::vector<double> g(grid.size(), 0.0);
    if (q0.atoms().empty()) return g;
    const double n = total_count(counts);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < contrib.size(); ++j)
            if (q0.atoms()[j].threshold <= grid[i]) acc += contrib[j];
        g[i] = acc / n;
    }
    return g;
}

} // namespace

ProposalQ0::ProposalQ0(std::vector<ProposalAtom> atoms, std::vector<int> depths, double root_cost)
    : atoms_(std::move(atoms)), depths_(std::move(depths)), root_cost_(root_cost) {
    if (!std::is_sorted(depths_.begin(), depths_.end())) throw InvalidArgument("charged depths must be increasing");
    if (atoms_.empty()) {
        if (!depths_.empty()) throw InvalidArgument("proposal has no atoms");
        return;
    }
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (!(a.proposal_prob > 0.0)) throw UnsupportedBelief("proposal probability must be positive on every atom");
        if (!std::binary_search(depths_.begin(), depths_.end(), a.node.depth))
            throw InvalidArgument("proposal atom at an uncharged depth");
        total += a.proposal_prob;
        bound_ = std::max(bound_, a.node.prob / a.proposal_prob);
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("proposal probabilities must sum to one");
}

ProposalQ0 build_default_proposal(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query,
                                  EnvelopeOptions opts, double marginal_weight, std::size_t budget) {
    if (!(marginal_weight >= 0.0 && marginal_weight <= 1.0))
        throw InvalidArgument("marginal weight must lie in [0, 1]");
    auto nodes = enumerate_delta_nodes(pair, policy, query, opts, budget);
    auto depths = charged_depths(query.k, pair.horizon_T, opts);
    const int a0 = query.action ? *query.action : policy.action(query.k, query.belief);
    const double root_cost = belief_cost(pair, query.belief, a0);
    if (nodes.empty()) return ProposalQ0({}, {}, root_cost);
    const double m = static_cast<double>(depths.size());
    const double uniform = 1.0 / static_cast<double>(nodes.size());
    std::vector<ProposalAtom> atoms;
    atoms.reserve(nodes.size());
    for (auto& n : nodes) {
        ProposalAtom a;
        a.proposal_prob = marginal_weight * n.prob / m + (1.0 - marginal_weight) * uniform;
        a.exact_target_prob_per_step.assign(depths.size(), 0.0);
        a.exact_target_prob_per_step[step_index(depths, n.depth)] = n.prob;
        a.weight = n.prob / a.proposal_prob;
        a.threshold = node_threshold(pair, root_cost, n.depth, n.prefix_return);
        a.node = std::move(n);
        atoms.push_back(std::move(a));
    }
    return ProposalQ0(std::move(atoms), std::move(depths), root_cost);
}

std::vector<std::uint64_t> multinomial_counts(std::span<const double> probs, std::uint64_t n, Rng& rng) {
    std::vector<std::uint64_t> counts(probs.size(), 0);
    if (probs.empty()) {
        if (n > 0) throw InvalidArgument("cannot draw from an empty distribution");
        return counts;
    }
    double remaining_mass = 1.0;
    std::uint64_t remaining = n;
    for (std::size_t j = 0; j < probs.size() && remaining > 0; ++j) {
        if (j + 1 == probs.size()) {
            counts[j] = remaining;
            break;
        }
        const double p = std::clamp(probs[j] / remaining_mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> bin(remaining, p);
        counts[j] = bin(rng);
        remaining -= counts[j];
        remaining_mass = std::max(remaining_mass - probs[j], std::numeric_limits<double>::min());
    }
    return counts;
}

std::vector<std::uint64_t> draw_delta_counts(const ProposalQ0& q0, std::uint64_t n, Rng& rng) {
    std::vector<double> probs;
    probs.reserve(q0.atoms().size());
    for (const auto& a : q0.atoms()) probs.push_back(a.proposal_prob);
    return multinomial_counts(probs, n, rng);
}

EpsilonEstimate epsilon_from_counts(const ProposalQ0& q0, std::span<const std::uint64_t> counts) {
    return epsilon_from_contributions(q0, counts, atom_contributions(q0, counts, nullptr, {}));
}

EpsilonEstimate estimate_epsilon(const ProposalQ0& q0, std::uint64_t n_delta, Rng& rng,
                                 const DeltaEstimator& delta_hat) {
    auto counts = draw_delta_counts(q0, n_delta, rng);
    return epsilon_from_contributions(q0, counts, atom_contributions(q0, counts, &rng, delta_hat));
}

std::vector<double> g_from_counts(const ProposalQ0& q0, std::span<const std::uint64_t> counts,
                                  std::span<const double> grid) {
    return g_from_contributions(q0, counts, atom_contributions(q0, counts, nullptr, {}), grid);
}

std::vector<double> estimate_g(const ProposalQ0& q0, std::uint64_t n_delta, std::span<const double> grid, Rng& rng,
                               const DeltaEstimator& delta_hat) {
    auto counts = draw_delta_counts(q0, n_delta, rng);
    return g_from_contributions(q0, counts, atom_contributions(q0, counts, &rng, delta_hat), grid);
}

std::uint64_t n_delta_for_epsilon(double v, double delta, double B, int terms) {
    check_sample_size_args(v, delta, B, terms);
    if (terms == 0) return 0;
    const double m = terms;
    return ceil_count(-8.0 * B * B * std::log(delta / (4.0 * m)) / ((v / m) * (v / m)));
}

std::uint64_t n_delta_for_g(double v, double delta, double B, int terms) {
    check_sample_size_args(v, delta, B, terms);
    if (terms == 0) return 0;
    const double m = terms;
    return ceil_count(-std::log((delta / m) / 2.0) * 2.0 * B * B / ((v / m) * (v / m)));
}

std::uint64_t n_delta_for_h(double v, double delta, double B, int terms, int bins) {
    if (bins < 1) throw InvalidArgument("need at least one bin");
    return n_delta_for_g(v, delta / bins, B, terms);
}

} // namespace riskbound
