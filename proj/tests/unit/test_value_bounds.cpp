#include <riskbound/errors.hpp>
#include <riskbound/scenarios.hpp>
#include <riskbound/value_bounds.hpp>

#include <gtest/gtest.h>

using namespace riskbound;

TEST(Scenarios, UnknownNameRejected) { EXPECT_THROW(builtin("nope"), UnknownScenario); }

TEST(Scenarios, ShapesMatchDescriptions) {
    auto s = builtin("two_state_sensor");
    EXPECT_EQ(s.problem.pair.n_states(), 2u);
    EXPECT_EQ(s.problem.pair.original.n_actions(), 2u);
    EXPECT_EQ(s.problem.pair.original.n_observations(), 2u);
    EXPECT_EQ(s.problem.pair.horizon_T - s.problem.pair.start_k, 4);
    EXPECT_DOUBLE_EQ(s.problem.pair.original.observation[0][1], 0.1);
    EXPECT_DOUBLE_EQ(s.problem.pair.simplified_observation[0][1], 0.25);

    auto c = builtin("corridor4");
    EXPECT_EQ(c.problem.pair.n_states(), 4u);
    EXPECT_EQ(c.problem.pair.horizon_T - c.problem.pair.start_k, 3);
    auto d = enumerate_return_distribution(c.problem.pair, c.problem.policy, c.default_query.tree(),
                                           ModelKind::Original);
    EXPECT_LE(d.size(), 64u);
}

TEST(Scenarios, DegradeHeavyEpsilonExceedsTenPercent) {
    auto s = builtin("degrade_heavy");
    ExactOracle o(s.problem.pair, s.problem.policy, s.default_query.tree());
    EXPECT_GE(o.epsilon(), 0.1);
    EXPECT_LT(o.epsilon(), 1.0);
}

TEST(Scenarios, RandomInstanceIsSeededAndPerturbationOrdered) {
    auto a = random_instance(42, 3, 2, 2, 3, 0.1);
    auto b = random_instance(42, 3, 2, 2, 3, 0.1);
    EXPECT_EQ(dump_problem(a.problem), dump_problem(b.problem));
    auto zero = random_instance(42, 3, 2, 2, 3, 0.0);
    ExactOracle oz(zero.problem.pair, zero.problem.policy, zero.default_query.tree());
    EXPECT_EQ(oz.epsilon(), 0.0);
    // With noisy sensors the two models produce different posteriors, so every
    // successor atom is unmatched and each charged step contributes 2.
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto lo = random_instance(seed, 3, 2, 2, 3, 0.1);
        auto hi = random_instance(seed, 3, 2, 2, 3, 0.3);
        ExactOracle olo(lo.problem.pair, lo.problem.policy, lo.default_query.tree());
        ExactOracle ohi(hi.problem.pair, hi.problem.policy, hi.default_query.tree());
        EXPECT_GE(ohi.epsilon(), olo.epsilon()) << "seed " << seed;
        EXPECT_NEAR(olo.epsilon(), 6.0, 1e-12) << "seed " << seed;
    }
}

TEST(Scenarios, PerturbationOrdersEpsilonWithPerfectSensors) {
    auto with_identity_sensor = [](ScenarioSpec s) {
        auto& pair = s.problem.pair;
        const std::size_t n = pair.n_states();
        Matrix eye(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) eye[i][i] = 1.0;
        pair.original.observation = eye;
        pair.simplified_observation = eye;
        pair.original.observations.clear();
        for (std::size_t i = 0; i < n; ++i) pair.original.observations.push_back("z" + std::to_string(i));
        s.problem.validate();
        return s;
    };
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto lo = with_identity_sensor(random_instance(seed, 3, 2, 3, 3, 0.1));
        auto hi = with_identity_sensor(random_instance(seed, 3, 2, 3, 3, 0.3));
        ExactOracle olo(lo.problem.pair, lo.problem.policy, lo.default_query.tree());
        ExactOracle ohi(hi.problem.pair, hi.problem.policy, hi.default_query.tree());
        EXPECT_GT(ohi.epsilon(), olo.epsilon()) << "seed " << seed;
    }
}

TEST(ValueBounds, IdenticalModelsGiveEqualBounds) {
    auto s = random_instance(3, 3, 2, 2, 3, 0.0);
    const auto& pr = s.problem;
    for (double alpha : {0.1, 0.5}) {
        ValueQuery q = s.default_query;
        q.alpha = alpha;
        auto u = q_bounds_uniform(pr.pair, pr.policy, q);
        const double exact = q_exact(pr.pair, pr.policy, q);
        EXPECT_NEAR(u.lower, exact, 1e-12);
        EXPECT_NEAR(u.upper, exact, 1e-12);
        EXPECT_NEAR(q_lower_tight(pr.pair, pr.policy, q), exact, 1e-12);
    }
}

TEST(ValueBounds, QWithPolicyActionEqualsV) {
    auto s = builtin("corridor4");
    ValueQuery v = s.default_query;
    ValueQuery q = v;
    q.action = s.problem.policy.action(q.k, q.belief);
    EXPECT_DOUBLE_EQ(q_exact(s.problem.pair, s.problem.policy, v), q_exact(s.problem.pair, s.problem.policy, q));
}

TEST(ValueBounds, SandwichOnRandomInstances) {
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        auto s = random_instance(seed, 3, 2, 3, 3, 0.25);
        ExactOracle o(s.problem.pair, s.problem.policy, s.default_query.tree());
        for (double alpha : {0.05, 0.25, 0.5, 0.9}) {
            auto r = o.report(alpha);
            EXPECT_TRUE(r.sandwich_ok) << "seed " << seed << " alpha " << alpha;
            EXPECT_LE(r.uniform.lower, r.tight_lower + 1e-9);
        }
    }
}

TEST(ValueBounds, GridEnvelopeIsConservative) {
    auto s = builtin("corridor4");
    ExactOracle o(s.problem.pair, s.problem.policy, s.default_query.tree());
    const double span = s.problem.pair.return_span(0);
    auto grid = BinGrid::uniform(-span, span, 8);
    for (double alpha : {0.1, 0.5}) {
        EXPECT_LE(o.tight_lower_on_grid(alpha, grid), o.tight_lower(alpha) + 1e-12);
        EXPECT_LE(o.tight_lower_on_grid(alpha, grid), o.q(alpha) + 1e-9);
    }
}

TEST(ValueBounds, EnvelopeDominatesCdfGapOnScenarios) {
    for (const auto& name : builtin_names()) {
        auto s = builtin(name);
        ExactOracle o(s.problem.pair, s.problem.policy, s.default_query.tree());
        const double span = s.problem.pair.return_span(0);
        for (int i = 0; i <= 200; ++i) {
            const double l = -span + 2 * span * i / 200.0;
            const double gap = std::abs(o.original().cdf(l) - o.simplified().cdf(l));
            const double g = o.expectations().envelope(l);
            EXPECT_LE(gap, g + 1e-9) << name << " l=" << l;
            EXPECT_LE(g, o.epsilon() + 1e-9);
        }
    }
}
