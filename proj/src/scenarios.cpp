#include <riskbound/errors.hpp>
#include <riskbound/scenarios.hpp>

#include <random>

namespace riskbound {

namespace {

ScenarioSpec finish(std::string name, Problem p, std::string notes) {
    p.name = name;
    p.validate();
    ScenarioSpec s{std::move(name), std::move(p), {}, std::move(notes)};
    s.default_query = {s.problem.pair.b0, s.problem.pair.start_k, std::nullopt, 0.25};
    return s;
}

std::vector<std::vector<int>> constant_policy(int steps, std::vector<int> row) {
    return std::vector<std::vector<int>>(static_cast<std::size_t>(steps), row);
}

Matrix sensor(double noise) { return {{1.0 - noise, noise}, {noise, 1.0 - noise}}; }

ScenarioSpec two_state_sensor() {
    Problem p;
    auto& m = p.pair.original;
    m.states = {"ok", "faulty"};
    m.actions = {"operate", "repair"};
    m.observations = {"normal", "alarm"};
    // operating can break the machine; repair resets it
    m.transition = {{{0.8, 0.2}, {0.0, 1.0}}, {{1.0, 0.0}, {1.0, 0.0}}};
    m.observation = sensor(0.1);
    m.cost = {{0.0, 0.5}, {1.0, 0.5}};
    m.r_max = 1.0;
    p.pair.simplified_transition = m.transition;
    p.pair.simplified_observation = sensor(0.25);
    p.pair.b0 = {0.5, 0.5};
    p.pair.start_k = 0;
    p.pair.horizon_T = 4;
    p.policy.start = 0;
    p.policy.table = constant_policy(5, {0, 1});
    return finish("two_state_sensor", std::move(p),
                  "Machine monitored by a noisy alarm; the simplified model uses a noisier sensor (0.25 vs 0.1).");
}

Tensor3 corridor_moves(double slip) {
    Matrix right(4, std::vector<double>(4, 0.0));
    Matrix stay(4, std::vector<double>(4, 0.0));
    for (int x = 0; x < 4; ++x) {
        const auto ux = static_cast<std::size_t>(x);
        stay[ux][ux] = 1.0;
        if (x == 3) {
            right[ux][ux] = 1.0;
        } else {
            right[ux][ux + 1] = 1.0 - slip;
            right[ux][ux] = slip;
        }
    }
    return {right, stay};
}

ScenarioSpec corridor4() {
    Problem p;
    auto& m = p.pair.original;
    m.states = {"c0", "c1", "c2", "c3"};
    m.actions = {"right", "stay"};
    m.observations = {"at0", "at1", "at2", "at3"};
    m.transition = corridor_moves(0.10);
    m.observation = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    for (int x = 0; x < 4; ++x) {
        const double d = (3.0 - x) / 3.0;
        m.cost.push_back({d, d});
    }
    m.r_max = 1.0;
    p.pair.simplified_transition = corridor_moves(0.12);
    p.pair.simplified_observation = m.observation;
    p.pair.b0 = {0.5, 0.5, 0.0, 0.0};
    p.pair.start_k = 0;
    p.pair.horizon_T = 3;
    p.policy.start = 0;
    p.policy.table = constant_policy(4, {0, 0, 0, 1});
    return finish("corridor4", std::move(p),
                  "Line world with a position sensor; the simplified model slips with probability 0.12 instead of 0.10.");
}

ScenarioSpec degrade_heavy() {
    Problem p;
    auto& m = p.pair.original;
    m.states = {"good", "worn", "broken"};
    m.actions = {"run", "fix"};
    m.observations = {"see_good", "see_worn", "see_broken"};
    const Matrix fix = {{1, 0, 0}, {1, 0, 0}, {1, 0, 0}};
    m.transition = {{{0.8, 0.15, 0.05}, {0.0, 0.6, 0.4}, {0.0, 0.0, 1.0}}, fix};
    m.observation = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    m.cost = {{0.0, 0.6}, {0.3, 0.6}, {1.0, 0.6}};
    m.r_max = 1.0;
    // the simplified model badly underestimates wear
    p.pair.simplified_transition = {{{0.9, 0.1, 0.0}, {0.0, 0.8, 0.2}, {0.0, 0.0, 1.0}}, fix};
    p.pair.simplified_observation = m.observation;
    p.pair.b0 = {1.0, 0.0, 0.0};
    p.pair.start_k = 0;
    p.pair.horizon_T = 3;
    p.policy.start = 0;
    p.policy.table = constant_policy(4, {0, 0, 1});
    return finish("degrade_heavy", std::move(p),
                  "Wear process whose simplified model underestimates degradation; epsilon exceeds small alphas.");
}

std::vector<double> dirichlet_row(std::mt19937_64& rng, int n) {
    std::gamma_distribution<double> gamma(1.0, 1.0);
    std::vector<double> r(static_cast<std::size_t>(n));
    double s = 0.0;
    for (auto& x : r) {
        x = gamma(rng) + 1e-12;
        s += x;
    }
    for (auto& x : r) x /= s;
    return r;
}

std::vector<double> mix_uniform(const std::vector<double>& row, double w) {
    std::vector<double> out(row.size());
    const double u = w / static_cast<double>(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) out[i] = (1.0 - w) * row[i] + u;
    return out;
}

} // namespace

std::vector<std::string> builtin_names() { return {"two_state_sensor", "corridor4", "degrade_heavy"}; }

ScenarioSpec builtin(const std::string& name) {
    if (name == "two_state_sensor") return two_state_sensor();
    if (name == "corridor4") return corridor4();
    if (name == "degrade_heavy") return degrade_heavy();
    throw UnknownScenario("unknown scenario: " + name);
}

ScenarioSpec random_instance(std::uint64_t seed, int n_states, int n_actions, int n_obs, int horizon_gap,
                             double perturbation) {
    if (n_states < 1 || n_actions < 1 || n_obs < 1 || horizon_gap < 0)
        throw InvalidArgument("random instance sizes must be positive");
    if (!(perturbation >= 0.0 && perturbation <= 1.0)) throw InvalidArgument("perturbation must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> cost(-1.0, 1.0);
    std::uniform_int_distribution<int> act(0, n_actions - 1);
    Problem p;
    auto& m = p.pair.original;
    for (int i = 0; i < n_states; ++i) m.states.push_back("s" + std::to_string(i));
    for (int i = 0; i < n_actions; ++i) m.actions.push_back("a" + std::to_string(i));
    for (int i = 0; i < n_obs; ++i) m.observations.push_back("z" + std::to_string(i));
    m.transition.resize(static_cast<std::size_t>(n_actions));
    p.pair.simplified_transition.resize(static_cast<std::size_t>(n_actions));
    for (int a = 0; a < n_actions; ++a)
        for (int x = 0; x < n_states; ++x) {
            auto row = dirichlet_row(rng, n_states);
            p.pair.simplified_transition[static_cast<std::size_t>(a)].push_back(mix_uniform(row, perturbation));
            m.transition[static_cast<std::size_t>(a)].push_back(std::move(row));
        }
    for (int x = 0; x < n_states; ++x) {
        auto row = dirichlet_row(rng, n_obs);
        p.pair.simplified_observation.push_back(mix_uniform(row, perturbation));
        m.observation.push_back(std::move(row));
    }
    for (int x = 0; x < n_states; ++x) {
        std::vector<double> c;
        for (int a = 0; a < n_actions; ++a) c.push_back(cost(rng));
        m.cost.push_back(std::move(c));
    }
    m.r_max = 1.0;
    p.pair.b0 = dirichlet_row(rng, n_states);
    p.pair.start_k = 0;
    p.pair.horizon_T = horizon_gap;
    p.policy.start = 0;
    for (int t = 0; t <= horizon_gap; ++t) {
        std::vector<int> row;
        for (int x = 0; x < n_states; ++x) row.push_back(act(rng));
        p.policy.table.push_back(std::move(row));
    }
    auto name = "random_" + std::to_string(seed);
    auto spec = finish(name, std::move(p), "Seeded random instance.");
    // fail early when the instance cannot be enumerated
    enumerate_return_distribution(spec.problem.pair, spec.problem.policy, spec.default_query.tree(),
                                  ModelKind::Original);
    return spec;
}

ScenarioSpec scenario_from_problem(Problem p, double alpha) {
    p.validate();
    ScenarioSpec s{p.name, std::move(p), {}, ""};
    s.default_query = {s.problem.pair.b0, s.problem.pair.start_k, std::nullopt, alpha};
    return s;
}

} // namespace riskbound
