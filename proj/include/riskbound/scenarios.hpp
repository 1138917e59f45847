#pragma once

#include <riskbound/problem.hpp>
#include <riskbound/value_bounds.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace riskbound {

struct ScenarioSpec {
    std::string name;
    Problem problem;
    ValueQuery default_query;
    std::string notes;
};

std::vector<std::string> builtin_names();

/// two_state_sensor, corridor4 or degrade_heavy; throws UnknownScenario otherwise.
ScenarioSpec builtin(const std::string& name);

/**
 * Random instance with Dirichlet(1) rows and costs uniform in [-1, 1]. The
 * simplified model mixes every original row with the uniform row at weight
 * `perturbation`. Same arguments give the same instance.
 */
ScenarioSpec random_instance(std::uint64_t seed, int n_states, int n_actions, int n_obs, int horizon_gap,
                             double perturbation);

/// Problem wrapped as a scenario with its default query at (b0, start_k).
ScenarioSpec scenario_from_problem(Problem p, double alpha = 0.25);

} // namespace riskbound
