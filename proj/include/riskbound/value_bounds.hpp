#pragma once

#include <riskbound/bins.hpp>
#include <riskbound/bounds.hpp>
#include <riskbound/enumerate.hpp>

#include <optional>
#include <span>

namespace riskbound {

/// CVaR value query at belief b_k; V when action is empty, Q otherwise.
struct ValueQuery {
    Belief belief;
    int k = 0;
    std::optional<int> action;
    double alpha = 0.25;

    TreeQuery tree() const { return {belief, k, action}; }
};

struct UniformValueBounds {
    double lower;
    double upper;
    double epsilon;
    LowerCase lower_case;
    UpperCase upper_case;
    SupportBounds support;
};

struct BoundReport {
    double alpha;
    double q_original;
    double q_simplified;
    double epsilon;
    UniformValueBounds uniform;
    /// Same bounds with the support replaced by cost-range extremes.
    UniformValueBounds uniform_tightened;
    double tight_lower;
    bool sandwich_ok;
};

/**
 * Exact return distributions under both models and the exact envelope g for
 * one (belief, k, action) query. Evaluating several alphas reuses the trees.
 */
class ExactOracle {
public:
    ExactOracle(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query, EnvelopeOptions opts = {},
                std::size_t budget = default_leaf_budget);

    const DiscreteDistribution& original() const { return original_; }
    const DiscreteDistribution& simplified() const { return simplified_; }
    const TrajectoryExpectations& expectations() const { return expectations_; }
    double epsilon() const { return expectations_.epsilon; }

    /// [-R_max(T-k+1), R_max(T-k+1)].
    SupportBounds support() const;
    /// c(b_k, a_k) plus (T-k) times the extreme state costs.
    SupportBounds tightened_support() const;

    double q(double alpha) const;
    double q_simplified(double alpha) const;
    UniformValueBounds uniform(double alpha, bool tightened = false) const;
    double tight_lower(double alpha) const;
    /// Tight lower bound with g replaced by its upper envelope on bin edges.
    double tight_lower_on_grid(double alpha, const BinGrid& grid) const;
    BoundReport report(double alpha) const;

private:
    const SimplifiedPair& pair_;
    int k_;
    DiscreteDistribution original_;
    DiscreteDistribution simplified_;
    TrajectoryExpectations expectations_;
};

double q_exact(const SimplifiedPair& pair, const Policy& policy, const ValueQuery& query,
               ModelKind model = ModelKind::Original);

UniformValueBounds q_bounds_uniform(const SimplifiedPair& pair, const Policy& policy, const ValueQuery& query,
                                    EnvelopeOptions opts = {}, bool tightened = false);

double q_lower_tight(const SimplifiedPair& pair, const Policy& policy, const ValueQuery& query,
                     EnvelopeOptions opts = {});

BoundReport bound_report(const SimplifiedPair& pair, const Policy& policy, const ValueQuery& query,
                         EnvelopeOptions opts = {});

} // namespace riskbound
