#include <riskbound/certify.hpp>
#include <riskbound/delta.hpp>
#include <riskbound/errors.hpp>
#include <riskbound/particle.hpp>
#include <riskbound/scenarios.hpp>
#include <riskbound/value_bounds.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace riskbound;

namespace {

// Deterministic chain x0 -> x1 -> x1 under the single action, perfect sensor.
Problem chain(int horizon) {
    Problem p;
    auto& m = p.pair.original;
    m.states = {"x0", "x1"};
    m.actions = {"go"};
    m.observations = {"z0", "z1"};
    m.transition = {{{0.0, 1.0}, {0.0, 1.0}}};
    m.observation = {{1, 0}, {0, 1}};
    m.cost = {{0.3}, {0.7}};
    m.r_max = 1.0;
    p.pair.simplified_transition = m.transition;
    p.pair.simplified_observation = m.observation;
    p.pair.b0 = {1.0, 0.0};
    p.pair.horizon_T = horizon;
    p.pair.start_k = 0;
    p.policy.table.assign(static_cast<std::size_t>(horizon + 1), {0, 0});
    p.validate();
    return p;
}

Problem identical_models(Problem p) {
    p.pair.simplified_transition = p.pair.original.transition;
    p.pair.simplified_observation = p.pair.original.observation;
    return p;
}

double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double std_error(const std::vector<double>& x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

} // namespace

TEST(SampleSize, EpsilonFormulaExample) { EXPECT_EQ(n_delta_for_epsilon(0.5, 0.05, 1.0, 1), 141u); }

TEST(SampleSize, GFormulaExample) {
    // -ln(0.025) * 2 / 0.25 = 29.51
    EXPECT_EQ(n_delta_for_g(0.5, 0.05, 1.0, 1), 30u);
    EXPECT_EQ(n_delta_for_h(0.5, 0.05, 1.0, 1, 1), 30u);
}

TEST(SampleSize, ZeroTermsNeedNoDraws) {
    EXPECT_EQ(n_delta_for_epsilon(0.1, 0.1, 1.0, 0), 0u);
    EXPECT_EQ(n_delta_for_g(0.1, 0.1, 1.0, 0), 0u);
    EXPECT_EQ(n_delta_for_h(0.1, 0.1, 1.0, 0, 5), 0u);
}

TEST(SampleSize, Monotonicity) {
    using F = std::uint64_t (*)(double, double, double, int);
    const F eps = n_delta_for_epsilon;
    const F g = n_delta_for_g;
    const F h = [](double v, double d, double B, int m) { return n_delta_for_h(v, d, B, m, 7); };
    for (F f : {eps, g, h}) {
        const auto base = f(0.1, 0.1, 2.0, 3);
        const auto twice = f(0.2, 0.1, 2.0, 3);
        EXPECT_LT(twice, base);
        EXPECT_NEAR(static_cast<double>(base) / static_cast<double>(twice), 4.0, 1e-3);
        EXPECT_LT(base, f(0.1, 0.05, 2.0, 3));
        EXPECT_LT(base, f(0.1, 0.1, 3.0, 3));
        EXPECT_LT(base, f(0.1, 0.1, 2.0, 4));
    }
    EXPECT_LT(n_delta_for_h(0.1, 0.1, 2.0, 3, 2), n_delta_for_h(0.1, 0.1, 2.0, 3, 10));
}

TEST(CvarCounts, MatchesExpandedSample) {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> values;
        std::vector<std::uint64_t> counts;
        std::vector<double> expanded;
        double v = -5.0;
        const int distinct = 1 + static_cast<int>(rng() % 20);
        for (int j = 0; j < distinct; ++j) {
            v += 0.01 + uniform01(rng);
            const auto c = rng() % 4;  // zero counts are allowed
            values.push_back(v);
            counts.push_back(c);
            for (std::uint64_t r = 0; r < c; ++r) expanded.push_back(v);
        }
        if (expanded.empty()) continue;
        for (double a : {0.05, 0.1, 0.25, 0.5, 0.9, 0.999})
            EXPECT_NEAR(cvar_estimate_counts(values, counts, a), cvar_estimate_presorted(expanded, a), 1e-12);
    }
}

TEST(ParticleBelief, RepresentsTheBeliefExactly) {
    auto pb = ParticleBelief::from_belief({0.2, 0.0, 0.8}, 7);
    EXPECT_EQ(pb.particles.size(), 7u);
    auto h = pb.histogram(3);
    EXPECT_NEAR(h[0], 0.2, 1e-15);
    EXPECT_EQ(h[1], 0.0);
    EXPECT_NEAR(h[2], 0.8, 1e-15);
    EXPECT_THROW(ParticleBelief::from_belief({0.5, 0.5}, 0), InvalidArgument);
}

TEST(Genpf, DeterministicPointMass) {
    auto p = chain(3);
    GenerativeModel model(p.pair, ModelKind::Simplified);
    auto b = ParticleBelief::from_belief({1.0, 0.0}, 5);
    Rng rng(1);
    auto [next, rho] = genpf(model, b, 0, rng);
    EXPECT_DOUBLE_EQ(rho, 0.3);
    for (const auto& q : next.particles) EXPECT_EQ(q.state, 1);
    EXPECT_NEAR(next.histogram(2)[1], 1.0, 1e-15);
}

TEST(Genpf, ConstantCostIndependentOfWeights) {
    auto s = builtin("two_state_sensor");
    for (auto& row : s.problem.pair.original.cost) row.assign(row.size(), 0.4);
    GenerativeModel model(s.problem.pair, ModelKind::Original);
    Rng rng(3);
    ParticleBelief b;
    for (int j = 0; j < 20; ++j) b.particles.push_back({j % 2, uniform01(rng) + 0.01});
    for (int a = 0; a < 2; ++a) {
        auto [next, rho] = genpf(model, b, a, rng);
        EXPECT_NEAR(rho, 0.4, 1e-15);
    }
}

TEST(Genpf, MeanCostMatchesBeliefCost) {
    auto s = builtin("two_state_sensor");
    const Belief b = {0.3, 0.7};
    GenerativeModel model(s.problem.pair, ModelKind::Original);
    Rng rng(11);
    std::vector<double> rhos;
    for (int call = 0; call < 10000; ++call) {
        // particles drawn iid from b with equal weights
        ParticleBelief pb;
        for (int j = 0; j < 500; ++j) pb.particles.push_back({uniform01(rng) < b[0] ? 0 : 1, 1.0});
        rhos.push_back(genpf(model, pb, 0, rng).second);
    }
    const double exact = belief_cost(s.problem.pair, b, 0);
    EXPECT_LE(std::abs(mean(rhos) - exact), 3.0 * std_error(rhos));
}

TEST(Genpf, DegenerateWeightsRaise) {
    auto p = chain(2);
    // no particle carries weight
    GenerativeModel model(p.pair, ModelKind::Simplified);
    ParticleBelief b{{{0, 0.0}, {1, 0.0}}};
    Rng rng(1);
    EXPECT_THROW(genpf(model, b, 0, rng), DegenerateWeights);
}

TEST(SampleReturn, DepthZeroAndOne) {
    auto p = chain(3);
    GenerativeModel model(p.pair, ModelKind::Simplified);
    auto b = ParticleBelief::from_belief({1.0, 0.0}, 4);
    Rng rng(5);
    EXPECT_EQ(sample_return(model, p.policy, b, 0, 0, 0, rng), 0.0);
    EXPECT_DOUBLE_EQ(sample_return(model, p.policy, b, 0, 0, 1, rng), 0.3);
    EXPECT_DOUBLE_EQ(sample_return(model, p.policy, b, 0, 0, 4, rng), 0.3 + 3 * 0.7);
}

TEST(SampleReturn, MomentsMatchEnumeration) {
    auto s = builtin("two_state_sensor");
    RolloutConfig cfg{10000, 300, 17};
    auto r = simulate_returns(s.problem.pair, s.problem.policy, s.default_query.tree(), ModelKind::Simplified, cfg);
    auto d = enumerate_return_distribution(s.problem.pair, s.problem.policy, s.default_query.tree(),
                                           ModelKind::Simplified);
    // particle filtering adds a bias of order 1/N_x on top of the sampling error
    EXPECT_LE(std::abs(mean(r) - d.mean()), 4.0 * std_error(r) + 0.01);
    std::vector<double> sq;
    for (double x : r) sq.push_back(x * x);
    double exact_sq = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) exact_sq += d.probs()[i] * d.values()[i] * d.values()[i];
    EXPECT_LE(std::abs(mean(sq) - exact_sq), 4.0 * std_error(sq) + 0.03);
}

TEST(EstimateQ, DeterministicModelGivesTheRolloutReturn) {
    auto p = chain(3);
    TreeQuery q{{1.0, 0.0}, 0, 0};
    for (double a : {0.05, 0.5, 0.999})
        EXPECT_NEAR(estimate_q(p.pair, p.policy, q, a, {50, 3, 2}), 0.3 + 3 * 0.7, 1e-12);
}

TEST(EstimateQ, AlphaNearOneIsTheSampleMean) {
    auto s = builtin("corridor4");
    RolloutConfig cfg{500, 50, 9};
    auto r = simulate_returns(s.problem.pair, s.problem.policy, s.default_query.tree(), ModelKind::Simplified, cfg);
    EXPECT_NEAR(estimate_q(s.problem.pair, s.problem.policy, s.default_query.tree(), 1.0 - 1e-12, cfg), mean(r), 1e-9);
}

TEST(Rollouts, IndependentOfWorkerCount) {
    auto s = builtin("two_state_sensor");
    RolloutConfig cfg{3000, 100, 23};
    auto a = simulate_returns(s.problem.pair, s.problem.policy, s.default_query.tree(), ModelKind::Simplified, cfg, 1);
    auto b = simulate_returns(s.problem.pair, s.problem.policy, s.default_query.tree(), ModelKind::Simplified, cfg, 4);
    EXPECT_EQ(a, b);
}

TEST(Proposal, ValidAndCoversTheTree) {
    for (const auto& name : builtin_names()) {
        auto s = builtin(name);
        auto q0 = build_default_proposal(s.problem.pair, s.problem.policy, s.default_query.tree());
        double total = 0.0;
        const int m = q0.terms();
        for (const auto& atom : q0.atoms()) {
            EXPECT_GT(atom.proposal_prob, 0.0);
            total += atom.proposal_prob;
            EXPECT_NEAR(atom.weight, atom.node.prob / atom.proposal_prob, 1e-12);
            EXPECT_EQ(atom.exact_target_prob_per_step.size(), static_cast<std::size_t>(m));
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_LE(q0.importance_bound(), 2.0 * m + 1e-12);
        EXPECT_EQ(q0.atoms().size(), enumerate_delta_nodes(s.problem.pair, s.problem.policy,
                                                           s.default_query.tree()).size());
    }
}

TEST(Proposal, MarginalProposalGivesUnitWeightsPerStep) {
    auto s = builtin("corridor4");
    auto q0 = build_default_proposal(s.problem.pair, s.problem.policy, s.default_query.tree(), {}, 1.0);
    for (const auto& atom : q0.atoms())
        if (atom.node.prob > 0.0) EXPECT_NEAR(atom.weight, q0.terms(), 1e-12);
    // with weight m, m-hat at each step is the plain average of the TV values drawn there
    Rng rng(4);
    auto counts = draw_delta_counts(q0, 20000, rng);
    auto est = epsilon_from_counts(q0, counts);
    for (std::size_t step = 0; step < q0.depths().size(); ++step) {
        double sum = 0.0;
        std::uint64_t drawn = 0;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            if (q0.atoms()[j].node.depth != q0.depths()[step]) continue;
            sum += static_cast<double>(counts[j]) * q0.atoms()[j].node.tv;
            drawn += counts[j];
        }
        const double share = static_cast<double>(drawn) / 20000.0;
        EXPECT_NEAR(est.per_step[step], share * q0.terms() * sum / static_cast<double>(drawn), 1e-12);
    }
}

TEST(DeltaDraws, CountsSumToN) {
    auto s = builtin("two_state_sensor");
    auto q0 = build_default_proposal(s.problem.pair, s.problem.policy, s.default_query.tree());
    Rng rng(8);
    auto counts = draw_delta_counts(q0, 123457, rng);
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    EXPECT_EQ(total, 123457u);
    Rng a(9), b(9);
    EXPECT_EQ(draw_delta_counts(q0, 1000, a), draw_delta_counts(q0, 1000, b));
}

TEST(EstimateEpsilon, IdenticalModelsGiveZero) {
    auto s = builtin("two_state_sensor");
    auto p = identical_models(s.problem);
    auto q0 = build_default_proposal(p.pair, p.policy, s.default_query.tree());
    Rng rng(2);
    EXPECT_EQ(estimate_epsilon(q0, 5000, rng).epsilon, 0.0);
}

TEST(EstimateEpsilon, UnbiasedAgainstExactEpsilon) {
    auto s = builtin("corridor4");
    ExactOracle oracle(s.problem.pair, s.problem.policy, s.default_query.tree());
    auto q0 = build_default_proposal(s.problem.pair, s.problem.policy, s.default_query.tree());
    const auto& exact = oracle.expectations();
    std::vector<double> eps;
    std::vector<std::vector<double>> steps(exact.per_step_m.size());
    for (std::uint64_t t = 0; t < 10000; ++t) {
        Rng rng = make_stream(99, 0, t);
        auto est = estimate_epsilon(q0, 30, rng);
        eps.push_back(est.epsilon);
        for (std::size_t i = 0; i < steps.size(); ++i) steps[i].push_back(est.per_step[i]);
    }
    EXPECT_LE(std::abs(mean(eps) - exact.epsilon), 4.0 * std_error(eps));
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const double se = std_error(steps[i]);
        EXPECT_LE(std::abs(mean(steps[i]) - exact.per_step_m[i]), 4.0 * se + 1e-15);
    }
}

TEST(EstimateEpsilon, PluginEstimatorIsCalledPerDraw) {
    auto s = builtin("corridor4");
    auto q0 = build_default_proposal(s.problem.pair, s.problem.policy, s.default_query.tree());
    Rng a(5), b(5);
    auto exact_plugin = [](const ProposalAtom& atom, Rng&) { return atom.node.tv; };
    EXPECT_DOUBLE_EQ(estimate_epsilon(q0, 400, a, exact_plugin).epsilon, estimate_epsilon(q0, 400, b).epsilon);
}

TEST(EstimateG, SaturatesAboveAndVanishesBelow) {
    auto s = builtin("degrade_heavy");
    auto q0 = build_default_proposal(s.problem.pair, s.problem.policy, s.default_query.tree());
    const double span = s.problem.pair.return_span(s.problem.pair.start_k);
    Rng rng(6);
    auto counts = draw_delta_counts(q0, 5000, rng);
    auto eps = epsilon_from_counts(q0, counts).epsilon;
    std::vector<double> grid = {-span - 1.0, span + 1.0};
    auto g = g_from_counts(q0, counts, grid);
    EXPECT_EQ(g[0], 0.0);
    EXPECT_NEAR(g[1], eps, 1e-12);
}

TEST(EstimateG, UnbiasedAgainstExactG) {
    auto s = builtin("degrade_heavy");
    auto q0 = build_default_proposal(s.problem.pair, s.problem.policy, s.default_query.tree());
    const auto grid = BinGrid::uniform(-3.0, 3.0, 12).edges();
    ExactOracle oracle(s.problem.pair, s.problem.policy, s.default_query.tree());
    std::vector<std::vector<double>> samples(grid.size());
    for (std::uint64_t t = 0; t < 4000; ++t) {
        Rng rng = make_stream(41, 0, t);
        auto g = estimate_g(q0, 25, grid, rng);
        for (std::size_t j = 0; j < grid.size(); ++j) samples[j].push_back(g[j]);
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double exact = oracle.expectations().envelope(grid[j]);
        EXPECT_LE(std::abs(mean(samples[j]) - exact), 4.0 * std_error(samples[j]) + 1e-12) << "l = " << grid[j];
    }
}

TEST(BinnedH, EdgeOrderingAndSingleBin) {
    BinnedEnvelope one(BinGrid({-1.0, 1.0}), {0.2, 0.5});
    EXPECT_EQ(one.h_plus(0.0), 0.5);
    EXPECT_EQ(one.h_minus(0.0), 0.2);
    BinnedEnvelope env(BinGrid::uniform(0.0, 4.0, 4), {0.0, 0.1, 0.1, 0.3, 0.4});
    for (double l = -0.5; l <= 4.5; l += 0.05) EXPECT_LE(env.h_minus(l), env.h_plus(l));
}

TEST(FHat, ValidStepCdf) {
    const std::vector<double> returns = {0.5, 1.0, 1.0, 2.5, 3.0};
    auto env = PointwiseEnvelope::step(1.2, 0.15);
    auto f = build_f_hat(returns, env, 0.05, -4.0, std::vector<double>{0.0, 2.0});
    EXPECT_EQ(f.cdf(-4.0 - 1e-9), 0.0);
    EXPECT_NEAR(f.cdf(-4.0), 0.05, 1e-15);
    EXPECT_NEAR(f.cdf(1.0), 0.6 + 0.05, 1e-15);
    EXPECT_NEAR(f.cdf(1.2), 0.6 + 0.2, 1e-15);
    EXPECT_NEAR(f.cdf(2.5), 0.8 + 0.2, 1e-15);
    EXPECT_EQ(f.cdf(3.0), 1.0);
    double prev = 0.0;
    for (double l = -5.0; l <= 4.0; l += 0.01) {
        EXPECT_GE(f.cdf(l), prev);
        prev = f.cdf(l);
    }
}

TEST(FHat, ReducesToEmpiricalReturns) {
    const std::vector<double> returns = {0.5, 1.0, 1.0, 2.5, 3.0, -1.0};
    auto f = build_f_hat(returns, PointwiseEnvelope::zero(), 0.0, -4.0);
    for (double a : {0.1, 0.25, 0.5, 0.999}) EXPECT_NEAR(cvar_exact(f, a), cvar_estimate_sorted(returns, a), 1e-12);
}

TEST(Certify, TightLowerDrawsConvergeToFHat) {
    auto s = builtin("corridor4");
    const auto& pair = s.problem.pair;
    auto q0 = build_default_proposal(pair, s.problem.policy, s.default_query.tree());
    auto returns = simulate_returns(pair, s.problem.policy, s.default_query.tree(), ModelKind::Simplified,
                                    {2000, 50, 3});
    CertifyParams params;
    params.alpha = 0.25;
    params.bins = 8;
    const std::uint64_t n = required_n_delta_tight(q0, params.eta, params.delta, params.bins);
    Rng rng(12);
    auto res = certify_tight_lower(pair, returns, q0, params, pair.start_k, n, rng);
    const double exact = cvar_exact(res.f_hat, params.alpha);
    auto radii = brown_radii(n, params.alpha, 0.01, 2.0 * pair.return_span(pair.start_k));
    EXPECT_LE(res.bound.value - exact, radii.lower);
    EXPECT_LE(exact - res.bound.value, radii.upper);
    EXPECT_GE(res.bound.n_delta_used, res.bound.n_delta_required);
    EXPECT_EQ(res.g_hat_edges.size(), static_cast<std::size_t>(params.bins + 1));
    for (std::size_t i = 0; i + 1 < res.g_hat_edges.size(); ++i) {
        BinnedEnvelope env(res.grid, res.g_hat_edges);
        const double e = res.grid.edges()[i + 1];
        EXPECT_LE(env.h_minus(e), env.h_plus(e));
        EXPECT_LE(res.g_hat_edges[i + 1], env.h_plus(e));
    }
}

TEST(Certify, IdenticalModelsCollapseAroundExactValue) {
    auto s = builtin("two_state_sensor");
    auto p = identical_models(s.problem);
    CertifyParams params;
    params.alpha = 0.25;
    params.v = 1e-3;
    params.rollouts = {20000, 100, 4};
    auto res = run_certification(p.pair, p.policy, s.default_query.tree(), params);
    const double q = q_exact(p.pair, p.policy, s.default_query);
    bool saw_u = false, saw_l = false;
    for (const auto& b : res.bounds) {
        EXPECT_EQ(b.eps_hat, 0.0);
        if (b.kind == BoundKind::U) {
            saw_u = true;
            ASSERT_TRUE(b.applicable);
            EXPECT_LE(std::abs(b.value - q), b.radius() + 0.05);
        }
        if (b.kind == BoundKind::L1) {
            // eps_hat - 4v < 0 leaves the second CVaR level undefined
            saw_l = true;
            EXPECT_FALSE(b.applicable);
            EXPECT_FALSE(b.case_tag.empty());
        }
    }
    EXPECT_TRUE(saw_u);
    EXPECT_TRUE(saw_l);
}

TEST(Certify, SaturatedScenarioUsesSecondLowerCase) {
    auto s = builtin("two_state_sensor");
    CertifyParams params;
    params.rollouts = {500, 50, 1};
    auto res = run_certification(s.problem.pair, s.problem.policy, s.default_query.tree(), params);
    ASSERT_EQ(res.bounds.size(), 3u);
    EXPECT_EQ(res.bounds[0].kind, BoundKind::L2);
    EXPECT_TRUE(res.bounds[0].applicable);
    EXPECT_EQ(res.bounds[0].radii.size(), 2u);
    EXPECT_EQ(res.bounds[1].kind, BoundKind::U);
    EXPECT_FALSE(res.bounds[1].applicable);
    EXPECT_EQ(res.bounds[2].kind, BoundKind::TightLower);
    for (const auto& b : res.bounds) EXPECT_GE(b.n_delta_used, b.n_delta_required);
}

TEST(Certify, UpperCaseRadiusFormula) {
    auto s = builtin("corridor4");
    CertifyParams params;
    params.rollouts = {800, 50, 2};
    auto res = run_certification(s.problem.pair, s.problem.policy, s.default_query.tree(), params);
    const double span = s.problem.pair.return_span(s.problem.pair.start_k);
    for (const auto& b : res.bounds) {
        if (b.kind != BoundKind::U || !b.applicable) continue;
        const double lam = 2.0 * span * std::sqrt(params.alpha - b.eps_hat) / params.alpha *
                           std::sqrt(5.0 * std::log(3.0 / (params.delta / 2.0)) / 800.0);
        EXPECT_NEAR(b.radius(), lam, 1e-12);
        return;
    }
    FAIL() << "no applicable upper bound";
}

TEST(Certify, ExplicitNDeltaBelowRequirementRejected) {
    auto s = builtin("corridor4");
    CertifyParams params;
    params.rollouts = {100, 20, 1};
    params.n_delta = 10;
    EXPECT_THROW(run_certification(s.problem.pair, s.problem.policy, s.default_query.tree(), params), InvalidArgument);
}

TEST(Certify, DeterministicAcrossRunsAndWorkers) {
    auto s = builtin("two_state_sensor");
    CertifyParams params;
    params.rollouts = {1500, 60, 77};
    params.workers = 1;
    auto a = run_certification(s.problem.pair, s.problem.policy, s.default_query.tree(), params);
    params.workers = 4;
    auto b = run_certification(s.problem.pair, s.problem.policy, s.default_query.tree(), params);
    ASSERT_EQ(a.bounds.size(), b.bounds.size());
    for (std::size_t i = 0; i < a.bounds.size(); ++i) {
        EXPECT_EQ(a.bounds[i].applicable, b.bounds[i].applicable);
        if (a.bounds[i].applicable) EXPECT_EQ(a.bounds[i].value, b.bounds[i].value);
        EXPECT_EQ(a.bounds[i].eps_hat, b.bounds[i].eps_hat);
    }
    EXPECT_EQ(a.returns, b.returns);
}
