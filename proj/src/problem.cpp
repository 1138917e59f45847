#include <riskbound/errors.hpp>
#include <riskbound/problem.hpp>

#include <fstream>
#include <sstream>

namespace riskbound {

using nlohmann::json;

void Problem::validate() const {
    pair.validate();
    policy.validate(pair);
}

Problem problem_from_json(const json& j) {
    Problem p;
    try {
        p.name = j.value("name", std::string{});
        auto& m = p.pair.original;
        m.states = j.at("states").get<std::vector<std::string>>();
        m.actions = j.at("actions").get<std::vector<std::string>>();
        m.observations = j.at("observations").get<std::vector<std::string>>();
        m.transition = j.at("transition").get<Tensor3>();
        m.observation = j.at("observation").get<Matrix>();
        m.cost = j.at("cost").get<Matrix>();
        m.r_max = j.at("r_max").get<double>();
        p.pair.simplified_transition = j.at("simplified_transition").get<Tensor3>();
        p.pair.simplified_observation = j.at("simplified_observation").get<Matrix>();
        p.pair.b0 = j.at("b0").get<Belief>();
        p.pair.horizon_T = j.at("horizon_T").get<int>();
        p.pair.start_k = j.at("start_k").get<int>();
        p.policy.start = p.pair.start_k;
        p.policy.table = j.at("policy").get<std::vector<std::vector<int>>>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed problem: ") + e.what());
    }
    p.validate();
    return p;
}

json problem_to_json(const Problem& p) {
    const auto& m = p.pair.original;
    json j;
    j["name"] = p.name;
    j["states"] = m.states;
    j["actions"] = m.actions;
    j["observations"] = m.observations;
    j["transition"] = m.transition;
    j["simplified_transition"] = p.pair.simplified_transition;
    j["observation"] = m.observation;
    j["simplified_observation"] = p.pair.simplified_observation;
    j["cost"] = m.cost;
    j["r_max"] = m.r_max;
    j["b0"] = p.pair.b0;
    j["horizon_T"] = p.pair.horizon_T;
    j["start_k"] = p.pair.start_k;
    j["policy"] = p.policy.table;
    return j;
}

std::string dump_problem(const Problem& p) { return problem_to_json(p).dump(2) + "\n"; }

Problem parse_problem(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("problem is not valid JSON: ") + e.what());
    }
    return problem_from_json(j);
}

Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open problem file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

void save_problem(const Problem& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write problem file " + path);
    out << dump_problem(p);
}

} // namespace riskbound
