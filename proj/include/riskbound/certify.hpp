#pragma once

#include <riskbound/bins.hpp>
#include <riskbound/delta.hpp>
#include <riskbound/particle.hpp>
#include <riskbound/risk.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace riskbound {

enum class BoundKind { L1, L2, U, TightLower };
std::string to_string(BoundKind kind);

struct CertifiedBound {
    BoundKind kind = BoundKind::L1;
    bool applicable = true;
    std::string case_tag;
    double value = 0.0;
    double alpha = 0.0;
    double delta = 0.0;
    double v = 0.0;
    double eta = 0.0;
    std::uint64_t n_delta_used = 0;
    std::uint64_t n_delta_required = 0;
    std::size_t c_used = 0;
    double importance_bound = 0.0;
    double eps_hat = 0.0;
    /// Named deviation radii in the order they enter the violation event.
    std::vector<std::pair<std::string, double>> radii;

    /// Sum of the radii: the slack in the violation event.
    double radius() const;
    /// True when the bound is violated against the exact value q.
    bool violated(double q) const;
};

struct CertifyParams {
    double alpha = 0.25;
    double delta = 0.1;
    double v = 0.1;
    double eta = 0.1;
    /// Explicit N_Delta; derived from the sample-size formula when empty.
    std::optional<std::uint64_t> n_delta;
    int bins = 10;
    RolloutConfig rollouts;
    int workers = 1;
};

/// Sample sizes required by the uniform and tight-lower certificates.
std::uint64_t required_n_delta_uniform(const ProposalQ0& q0, double v, double delta);
std::uint64_t required_n_delta_tight(const ProposalQ0& q0, double eta, double delta, int bins);

/**
 * L1 or L2 and, when alpha > eps_hat, U from simplified-model rollout returns
 * and an importance-sampled eps_hat. Records that cannot be formed carry
 * applicable = false and a case tag.
 */
std::vector<CertifiedBound> certify_uniform(const SimplifiedPair& pair, std::span<const double> returns,
                                            const ProposalQ0& q0, const CertifyParams& params, int k,
                                            std::uint64_t n_delta, Rng& rng);

struct TightLowerResult {
    CertifiedBound bound;
    DiscreteDistribution f_hat;  ///< the step CDF the values are drawn from
    std::vector<double> g_hat_edges;
    BinGrid grid;
};

/// Step CDF min(1, P_hat(R <= l) + envelope(l) + eta) on [k0, inf), 0 below k0.
DiscreteDistribution build_f_hat(std::span<const double> returns, const PointwiseEnvelope& envelope, double eta,
                                 double k0, std::span<const double> extra_points = {});

TightLowerResult certify_tight_lower(const SimplifiedPair& pair, std::span<const double> returns,
                                     const ProposalQ0& q0, const CertifyParams& params, int k,
                                     std::uint64_t n_delta, Rng& rng);

struct CertificationResult {
    std::vector<double> returns;
    double importance_bound = 0.0;
    int terms = 0;
    std::size_t proposal_atoms = 0;
    std::uint64_t n_delta_uniform = 0;
    std::uint64_t n_delta_tight = 0;
    bool n_delta_derived = true;
    std::vector<CertifiedBound> bounds;  ///< uniform records then the tight lower bound
    DiscreteDistribution f_hat;
};

/**
 * Full run: rollouts, default proposal, eps_hat, g_hat and every certified
 * bound. Each stage draws from its own stream of params.rollouts.rng_seed.
 * An explicit N_Delta below a formula requirement throws InvalidArgument.
 */
CertificationResult run_certification(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query,
                                      const CertifyParams& params, std::size_t budget = default_leaf_budget);

} // namespace riskbound
