#pragma once

#include <riskbound/enumerate.hpp>
#include <riskbound/rng.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace riskbound {

/**
 * Delta belief: a node b_i of the simplified belief tree together with the
 * prefix return R_{k+1:i} of the trajectory that reaches it.
 */
struct ProposalAtom {
    DeltaNode node;
    double proposal_prob = 0.0;
    /// P_s(b_i | b_k, pi) for each charged depth; non-zero only at node.depth.
    std::vector<double> exact_target_prob_per_step;
    /// Importance weight P_s(b_i | b_k, pi) / Q0(b_i).
    double weight = 0.0;
    /// Smallest l at which the atom enters g(l).
    double threshold = 0.0;
};

class ProposalQ0 {
public:
    ProposalQ0(std::vector<ProposalAtom> atoms, std::vector<int> depths, double root_cost);

    const std::vector<ProposalAtom>& atoms() const { return atoms_; }
    const std::vector<int>& depths() const { return depths_; }
    /// Number of summed TV terms.
    int terms() const { return static_cast<int>(depths_.size()); }
    /// max over atoms of target / proposal probability.
    double importance_bound() const { return bound_; }
    double root_cost() const { return root_cost_; }

private:
    std::vector<ProposalAtom> atoms_;
    std::vector<int> depths_;
    double root_cost_;
    double bound_ = 0.0;
};

/**
 * Q0 = w * (P_s marginal / m) + (1 - w) * uniform over the simplified belief
 * tree nodes at the charged depths. w = 1 gives unit weights up to the factor m.
 */
ProposalQ0 build_default_proposal(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query,
                                  EnvelopeOptions opts = {}, double marginal_weight = 0.5,
                                  std::size_t budget = default_leaf_budget);

/// Multinomial counts of n draws over `probs` (summing to one), by successive conditional binomials.
std::vector<std::uint64_t> multinomial_counts(std::span<const double> probs, std::uint64_t n, Rng& rng);

/// Number of draws of each proposal atom among n iid draws from Q0.
std::vector<std::uint64_t> draw_delta_counts(const ProposalQ0& q0, std::uint64_t n, Rng& rng);

/// Estimator of Delta^s at a drawn atom; the default uses the exact TV distance stored on the node.
using DeltaEstimator = std::function<double(const ProposalAtom&, Rng&)>;

struct EpsilonEstimate {
    double epsilon = 0.0;
    std::vector<double> per_step;  ///< m-hat per charged depth
    std::uint64_t n_delta = 0;
};

/// Importance-sampled estimate of epsilon from n_delta draws of Q0.
EpsilonEstimate estimate_epsilon(const ProposalQ0& q0, std::uint64_t n_delta, Rng& rng,
                                 const DeltaEstimator& delta_hat = {});

/// Same estimate from precomputed draw counts.
EpsilonEstimate epsilon_from_counts(const ProposalQ0& q0, std::span<const std::uint64_t> counts);

/// Importance-sampled g(l) on each grid point.
std::vector<double> estimate_g(const ProposalQ0& q0, std::uint64_t n_delta, std::span<const double> grid, Rng& rng,
                               const DeltaEstimator& delta_hat = {});

std::vector<double> g_from_counts(const ProposalQ0& q0, std::span<const std::uint64_t> counts,
                                  std::span<const double> grid);

/// ceil(-8 B^2 ln(delta / (4m)) / (v/m)^2); zero when m = 0.
std::uint64_t n_delta_for_epsilon(double v, double delta, double B, int terms);

/// ceil(-ln((delta/m)/2) 2 B^2 / (v/m)^2); zero when m = 0.
std::uint64_t n_delta_for_g(double v, double delta, double B, int terms);

/// n_delta_for_g with delta replaced by delta / I.
std::uint64_t n_delta_for_h(double v, double delta, double B, int terms, int bins);

} // namespace riskbound
