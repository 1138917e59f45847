#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace riskbound {

using Matrix = std::vector<std::vector<double>>;
/// Indexed [action][state][next state].
using Tensor3 = std::vector<Matrix>;
/// Probability vector over states.
using Belief = std::vector<double>;

enum class ModelKind { Original, Simplified };

/**
 * Finite POMDP with action-independent observations. observation[x'][z] is the
 * probability of seeing z after landing in x'; cost[x][a] lies in [-r_max, r_max].
 */
struct FinitePomdp {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<std::string> observations;
    Tensor3 transition;
    Matrix observation;
    Matrix cost;
    double r_max = 1.0;

    std::size_t n_states() const { return states.size(); }
    std::size_t n_actions() const { return actions.size(); }
    std::size_t n_observations() const { return observations.size(); }
    void validate() const;
};

/// Original model together with a simplified transition and observation model.
struct SimplifiedPair {
    FinitePomdp original;
    Tensor3 simplified_transition;
    Matrix simplified_observation;
    Belief b0;
    int horizon_T = 0;
    int start_k = 0;

    const Tensor3& transition(ModelKind m) const {
        return m == ModelKind::Original ? original.transition : simplified_transition;
    }
    const Matrix& observation(ModelKind m) const {
        return m == ModelKind::Original ? original.observation : simplified_observation;
    }
    std::size_t n_states() const { return original.n_states(); }
    /// Width parameter R_max * (T - k + 1) of the return support.
    double return_span(int k) const { return original.r_max * static_cast<double>(horizon_T - k + 1); }
    void validate() const;
};

/// Deterministic policy keyed by time step and most likely state.
struct Policy {
    int start = 0;
    /// table[t - start][state] = action
    std::vector<std::vector<int>> table;

    int action(int t, const Belief& b) const;
    void validate(const SimplifiedPair& pair) const;
};

struct BeliefTransitionAtom {
    Belief belief;
    double prob;
    int observation;
};

/// Index of the largest entry, lowest index on ties.
std::size_t argmax_state(const std::vector<double>& weights);

void check_belief(const SimplifiedPair& pair, const Belief& b);

Belief belief_update(const SimplifiedPair& pair, const Belief& b, int a, int z, ModelKind model);

/// One atom per observation with positive probability.
std::vector<BeliefTransitionAtom> belief_mdp_step(const SimplifiedPair& pair, const Belief& b, int a, ModelKind model);

/// Total variation distance (sum of absolute differences) between successor-belief kernels.
double tv_distance(const SimplifiedPair& pair, const Belief& b, int a);

double belief_cost(const SimplifiedPair& pair, const Belief& b, int a);

} // namespace riskbound
