#pragma once

#include <riskbound/pomdp.hpp>

#include <json.hpp>

#include <string>

namespace riskbound {

/// A simplified pair together with the policy to evaluate; the unit stored in problem files.
struct Problem {
    std::string name;
    SimplifiedPair pair;
    Policy policy;

    void validate() const;
};

Problem problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const Problem& p);

/// Pretty-printed JSON; doubles are written in shortest round-trip form.
std::string dump_problem(const Problem& p);
Problem parse_problem(const std::string& text);
Problem load_problem(const std::string& path);
void save_problem(const Problem& p, const std::string& path);

} // namespace riskbound
