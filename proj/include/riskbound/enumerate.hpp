#pragma once

#include <riskbound/bounds.hpp>
#include <riskbound/pomdp.hpp>
#include <riskbound/risk.hpp>

#include <optional>
#include <span>
#include <vector>

namespace riskbound {

inline constexpr std::size_t default_leaf_budget = 10'000'000;

/// Return R_{k:T} from `belief` at time k; the first action is forced when given.
struct TreeQuery {
    Belief belief;
    int k = 0;
    std::optional<int> action;
};

/// Exact distribution of the cumulative belief cost by depth-first enumeration.
DiscreteDistribution enumerate_return_distribution(const SimplifiedPair& pair, const Policy& policy,
                                                   const TreeQuery& query, ModelKind model,
                                                   std::size_t budget = default_leaf_budget);

/// Expected return computed by backward recursion over the same belief tree.
double expected_return(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query, ModelKind model);

/**
 * Node b_i of the simplified-model belief tree at which a transition deviation
 * is charged. prefix_return = R_{k+1:i}, prob = P_s(b_i | b_k).
 */
struct DeltaNode {
    int depth;
    Belief belief;
    double prob;
    double prefix_return;
    int action;
    double tv;
};

struct EnvelopeOptions {
    /// Charge the first transition Delta(b_k, a_k). Off reproduces the sum over k+1..T-1 only.
    bool include_root_transition = true;
};

/// Depths at which deviations are charged, in increasing order.
std::vector<int> charged_depths(int k, int horizon_T, EnvelopeOptions opts);

std::vector<DeltaNode> enumerate_delta_nodes(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query,
                                             EnvelopeOptions opts = {}, std::size_t budget = default_leaf_budget);

/// Threshold l at which node (depth, prefix) starts to count: prefix <= l - c_k + (T - depth) R_max.
double node_threshold(const SimplifiedPair& pair, double root_cost, int depth, double prefix_return);

struct TrajectoryExpectations {
    std::vector<double> g_values;    ///< g evaluated on the requested grid
    double epsilon = 0.0;            ///< sum of per-step expectations
    std::vector<int> depths;         ///< charged depths
    std::vector<double> per_step_m;  ///< E_s[Delta(b_i, a_i)] per charged depth
    PointwiseEnvelope envelope;      ///< exact g as a step function
    double root_cost = 0.0;          ///< c(b_k, a_k)
};

TrajectoryExpectations enumerate_trajectory_expectations(const SimplifiedPair& pair, const Policy& policy,
                                                         const TreeQuery& query, std::span<const double> grid,
                                                         EnvelopeOptions opts = {},
                                                         std::size_t budget = default_leaf_budget);

} // namespace riskbound
