#include <riskbound/enumerate.hpp>
#include <riskbound/errors.hpp>

#include <map>
#include <string>

namespace riskbound {

namespace {

constexpr double min_branch_prob = 1e-300;

void check_query(const SimplifiedPair& pair, const TreeQuery& q) {
    check_belief(pair, q.belief);
    if (q.k < 0 || q.k > pair.horizon_T) throw InvalidArgument("query time must lie in [0, horizon_T]");
}

int node_action(const Policy& policy, const TreeQuery& q, int t, const Belief& b) {
    return (t == q.k && q.action) ? *q.action : policy.action(t, b);
}

struct ReturnWalker {
    const SimplifiedPair& pair;
    const Policy& policy;
    const TreeQuery& query;
    ModelKind model;
    std::size_t budget;
    std::map<double, double> leaves;
    std::size_t n_leaves = 0;

    void walk(int t, const Belief& b, double prob, double acc) {
        const int a = node_action(policy, query, t, b);
        const double r = acc + belief_cost(pair, b, a);
        if (t == pair.horizon_T) {
            if (++n_leaves > budget)
                throw BudgetExceeded("return enumeration exceeded leaf budget of " + std::to_string(budget));
            leaves[r] += prob;
            return;
        }
        for (const auto& atom : belief_mdp_step(pair, b, a, model)) {
            const double p = prob * atom.prob;
            if (p < min_branch_prob) continue;
            walk(t + 1, atom.belief, p, r);
        }
    }
};

struct DeltaWalker {
    const SimplifiedPair& pair;
    const Policy& policy;
    const TreeQuery& query;
    int first_charged;
    std::size_t budget;
    std::vector<DeltaNode> nodes;
    std::size_t visited = 0;

    void walk(int t, const Belief& b, double prob, double prefix_before) {
        if (++visited > budget)
            throw BudgetExceeded("belief tree enumeration exceeded node budget of " + std::to_string(budget));
        const int a = node_action(policy, query, t, b);
        const double c = belief_cost(pair, b, a);
        const double prefix = t == query.k ? 0.0 : prefix_before + c;
        if (t >= pair.horizon_T) return;
        if (t >= first_charged) nodes.push_back({t, b, prob, prefix, a, tv_distance(pair, b, a)});
        if (t + 1 >= pair.horizon_T) return;
        for (const auto& atom : belief_mdp_step(pair, b, a, ModelKind::Simplified)) {
            const double p = prob * atom.prob;
            if (p < min_branch_prob) continue;
            walk(t + 1, atom.belief, p, prefix);
        }
    }
};

} // namespace

DiscreteDistribution enumerate_return_distribution(const SimplifiedPair& pair, const Policy& policy,
                                                   const TreeQuery& query, ModelKind model, std::size_t budget) {
    check_query(pair, query);
    ReturnWalker w{pair, policy, query, model, budget, {}};
    w.walk(query.k, query.belief, 1.0, 0.0);
    std::vector<std::pair<double, double>> atoms(w.leaves.begin(), w.leaves.end());
    double total = 0.0;
    for (const auto& a : atoms) total += a.second;
    // pruned branches and rounding leave the total a hair off one
    for (auto& a : atoms) a.second /= total;
    return DiscreteDistribution(std::move(atoms));
}

double expected_return(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query, ModelKind model) {
    check_query(pair, query);
    auto rec = [&](auto&& self, int t, const Belief& b) -> double {
        const int a = node_action(policy, query, t, b);
        double v = belief_cost(pair, b, a);
        if (t == pair.horizon_T) return v;
        for (const auto& atom : belief_mdp_step(pair, b, a, model)) v += atom.prob * self(self, t + 1, atom.belief);
        return v;
    };
    return rec(rec, query.k, query.belief);
}

std::vector<int> charged_depths(int k, int horizon_T, EnvelopeOptions opts) {
    std::vector<int> d;
    for (int i = opts.include_root_transition ? k : k + 1; i <= horizon_T - 1; ++i) d.push_back(i);
    return d;
}

std::vector<DeltaNode> enumerate_delta_nodes(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query,
                                             EnvelopeOptions opts, std::size_t budget) {
    check_query(pair, query);
    DeltaWalker w{pair, policy, query, opts.include_root_transition ? query.k : query.k + 1, budget, {}};
    w.walk(query.k, query.belief, 1.0, 0.0);
    return std::move(w.nodes);
}

double node_threshold(const SimplifiedPair& pair, double root_cost, int depth, double prefix_return) {
    return prefix_return + root_cost - static_cast<double>(pair.horizon_T - depth) * pair.original.r_max;
}

TrajectoryExpectations enumerate_trajectory_expectations(const SimplifiedPair& pair, const Policy& policy,
                                                         const TreeQuery& query, std::span<const double> grid,
                                                         EnvelopeOptions opts, std::size_t budget) {
    TrajectoryExpectations out;
    const auto nodes = enumerate_delta_nodes(pair, policy, query, opts, budget);
    const int a0 = node_action(policy, query, query.k, query.belief);
    out.root_cost = belief_cost(pair, query.belief, a0);
    out.depths = charged_depths(query.k, pair.horizon_T, opts);
    out.per_step_m.assign(out.depths.size(), 0.0);
    std::vector<std::pair<double, double>> masses;
    masses.reserve(nodes.size());
    const int first = out.depths.empty() ? 0 : out.depths.front();
    for (const auto& n : nodes) {
        const double w = n.prob * n.tv;
        out.per_step_m[static_cast<std::size_t>(n.depth - first)] += w;
        masses.emplace_back(node_threshold(pair, out.root_cost, n.depth, n.prefix_return), w);
    }
    for (double m : out.per_step_m) out.epsilon += m;
    out.envelope = density_envelope_to_g(std::move(masses));
    out.g_values.reserve(grid.size());
    for (double l : grid) out.g_values.push_back(out.envelope(l));
    return out;
}

} // namespace riskbound
