#pragma once

#include <riskbound/enumerate.hpp>
#include <riskbound/pomdp.hpp>
#include <riskbound/rng.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace riskbound {

struct RolloutConfig {
    std::size_t num_rollouts_C = 2000;
    std::size_t num_particles_Nx = 200;
    std::uint64_t rng_seed = 1;

    void validate() const;
};

struct Particle {
    int state;
    double weight;
};

struct ParticleBelief {
    std::vector<Particle> particles;

    /// N_x particles spread over the support of b, weighted so that the
    /// weighted histogram equals b exactly.
    static ParticleBelief from_belief(const Belief& b, std::size_t n_x);

    /// Normalised weight per state.
    std::vector<double> histogram(std::size_t n_states) const;
    void validate() const;
};

/// Sampling tables of one model of a pair.
class GenerativeModel {
public:
    GenerativeModel(const SimplifiedPair& pair, ModelKind model);

    int next_state(int x, int a, Rng& rng) const;
    int observe(int x_next, Rng& rng) const;
    double likelihood(int x_next, int z) const { return observation_[static_cast<std::size_t>(x_next)][static_cast<std::size_t>(z)]; }
    double cost(int x, int a) const { return pair_.original.cost[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)]; }
    const SimplifiedPair& pair() const { return pair_; }

private:
    const SimplifiedPair& pair_;
    const Matrix& observation_;
    std::vector<std::vector<std::vector<double>>> transition_cdf_;
    std::vector<std::vector<double>> observation_cdf_;
};

/// One step of the particle-belief generative model; returns (b', rho).
std::pair<ParticleBelief, double> genpf(const GenerativeModel& model, const ParticleBelief& b, int a, Rng& rng);

/// Sum of rho over `depth` steps starting at time t with action a, then following the policy.
double sample_return(const GenerativeModel& model, const Policy& policy, const ParticleBelief& b, int a, int t,
                     int depth, Rng& rng);

/**
 * C rollout returns R_{k:T} from the particle belief of `query.belief`, one
 * RNG stream per rollout, in rollout order. A rollout whose weights all vanish
 * is redrawn from its own stream.
 */
std::vector<double> simulate_returns(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query,
                                     ModelKind model, const RolloutConfig& config, int workers = 1);

/// Sample CVaR of C rollout returns.
double estimate_q(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query, double alpha,
                  const RolloutConfig& config, ModelKind model = ModelKind::Simplified, int workers = 1);

} // namespace riskbound
