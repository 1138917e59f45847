#include "cli.hpp"

#include <riskbound/certify.hpp>
#include <riskbound/errors.hpp>
#include <riskbound/parallel.hpp>
#include <riskbound/scenarios.hpp>
#include <riskbound/value_bounds.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace riskbound::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t brown_tag = 10;
constexpr std::uint64_t epsilon_tag = 11;
constexpr std::uint64_t g_tag = 12;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

ScenarioSpec load_source(const RunManifest& m) {
    ScenarioSpec s;
    if (!m.problem_path.empty()) {
        if (!m.scenario.empty()) throw InvalidArgument("give either --problem or --scenario, not both");
        s = scenario_from_problem(load_problem(m.problem_path));
    } else if (!m.scenario.empty()) {
        s = builtin(m.scenario);
    } else {
        throw InvalidArgument("one of --problem or --scenario is required");
    }
    if (m.action) {
        if (*m.action < 0 || static_cast<std::size_t>(*m.action) >= s.problem.pair.original.n_actions())
            throw InvalidArgument("--action is out of range");
        s.default_query.action = *m.action;
    }
    return s;
}

json manifest_json(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["scenario"] = m.scenario.empty() ? json(nullptr) : json(m.scenario);
    j["problem"] = m.problem_path.empty() ? json(nullptr) : json(m.problem_path);
    j["alpha"] = m.alphas;
    j["delta"] = m.delta;
    j["v"] = m.v;
    j["eta"] = m.eta;
    j["rollouts"] = m.rollouts;
    j["particles"] = m.particles;
    j["ndelta"] = m.ndelta ? json(*m.ndelta) : json("auto");
    j["bins"] = m.bins;
    j["seed"] = m.seed;
    j["trials"] = m.trials;
    j["check"] = m.check;
    j["action"] = m.action ? json(*m.action) : json(nullptr);
    j["out"] = m.out.empty() ? json(nullptr) : json(m.out);
    j["format"] = m.format;
    return j;
}

json envelope(const RunManifest& m, json manifest, json records, json summary) {
    summary["n_records"] = records.size();
    return {{"schema_version", schema_version},
            {"command", m.command},
            {"manifest", std::move(manifest)},
            {"records", std::move(records)},
            {"summary", std::move(summary)}};
}

CertifyParams certify_params(const RunManifest& m, double alpha, std::uint64_t seed, int workers) {
    CertifyParams p;
    p.alpha = alpha;
    p.delta = m.delta;
    p.v = m.v;
    p.eta = m.eta;
    p.n_delta = m.ndelta;
    p.bins = m.bins;
    p.rollouts = {m.rollouts, m.particles, seed};
    p.workers = workers;
    return p;
}

/// Smallest k with P(Bin(n, p) <= k) >= level.
std::uint64_t binomial_quantile(std::uint64_t n, double p, double level) {
    if (n == 0) return 0;
    double log_pmf = static_cast<double>(n) * std::log1p(-p);
    double cdf = std::exp(log_pmf);
    std::uint64_t k = 0;
    while (cdf < level && k < n) {
        log_pmf += std::log(static_cast<double>(n - k) / static_cast<double>(k + 1)) + std::log(p) - std::log1p(-p);
        ++k;
        cdf += std::exp(log_pmf);
    }
    return k;
}

json violation_record(const std::string& check, const std::string& guarantee, std::optional<double> alpha,
                      std::optional<double> l, std::uint64_t trials, std::uint64_t violations, double delta,
                      std::uint64_t n_samples, std::optional<std::uint64_t> invalid = std::nullopt) {
    const double freq = trials ? static_cast<double>(violations) / static_cast<double>(trials) : 0.0;
    const auto limit = binomial_quantile(trials, delta, 0.99);
    return {{"record", "violation_rate"},
            {"check", check},
            {"guarantee", guarantee},
            {"alpha", alpha ? json(*alpha) : json(nullptr)},
            {"l", l ? json(*l) : json(nullptr)},
            {"trials", trials},
            {"violations", violations},
            {"frequency", freq},
            {"delta", delta},
            {"within_delta", freq <= delta},
            {"binomial_limit", limit},
            {"pass_binomial", violations <= limit},
            {"n_samples", n_samples},
            {"invalid", invalid ? json(*invalid) : json(nullptr)}};
}

bool f_hat_valid(const DiscreteDistribution& f, std::span<const double> returns, double k0) {
    double total = 0.0;
    for (double p : f.probs()) {
        if (!(p > 0.0)) return false;
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) return false;
    if (f.min() < k0 || f.cdf(std::nextafter(k0, -INFINITY)) != 0.0) return false;
    const double top = *std::max_element(returns.begin(), returns.end());
    return std::abs(f.cdf(top) - 1.0) <= 1e-12;
}

std::vector<double> grid_edges(const SimplifiedPair& pair, int k, int bins) {
    const double span = pair.return_span(k);
    return BinGrid::uniform(-span, span, bins).edges();
}

} // namespace

json cmd_enumerate(const RunManifest& m) {
    const auto s = load_source(m);
    const auto& pair = s.problem.pair;
    const auto query = s.default_query.tree();
    ExactOracle oracle(pair, s.problem.policy, query);
    const BinGrid grid(grid_edges(pair, query.k, m.bins));
    json records = json::array();
    bool sandwich_all = true;
    for (double alpha : m.alphas) {
        const auto r = oracle.report(alpha);
        sandwich_all = sandwich_all && r.sandwich_ok;
        records.push_back({{"record", "bound"},
                           {"alpha", alpha},
                           {"q_original", num(r.q_original)},
                           {"q_simplified", num(r.q_simplified)},
                           {"epsilon", num(r.epsilon)},
                           {"lower_uniform", num(r.uniform.lower)},
                           {"upper_uniform", num(r.uniform.upper)},
                           {"lower_case", to_string(r.uniform.lower_case)},
                           {"upper_case", to_string(r.uniform.upper_case)},
                           {"lower_uniform_tightened", num(r.uniform_tightened.lower)},
                           {"upper_uniform_tightened", num(r.uniform_tightened.upper)},
                           {"tight_lower", num(r.tight_lower)},
                           {"tight_lower_binned", num(oracle.tight_lower_on_grid(alpha, grid))},
                           {"sandwich_ok", r.sandwich_ok}});
    }
    for (auto [name, dist] : {std::pair{"original", &oracle.original()}, std::pair{"simplified", &oracle.simplified()}})
        for (std::size_t i = 0; i < dist->size(); ++i)
            records.push_back({{"record", "distribution"},
                               {"model", name},
                               {"value", dist->values()[i]},
                               {"prob", dist->probs()[i]}});
    bool envelope_ok = true;
    for (double l : grid.edges()) {
        const double g = oracle.expectations().envelope(l);
        const double gap = std::abs(oracle.original().cdf(l) - oracle.simplified().cdf(l));
        const bool ok = gap <= g + 1e-9 && g <= oracle.epsilon() + 1e-9;
        envelope_ok = envelope_ok && ok;
        records.push_back({{"record", "g"}, {"l", l}, {"g", g}, {"cdf_gap", gap}, {"envelope_ok", ok}});
    }
    json summary = {{"epsilon", oracle.epsilon()},
                    {"per_step_m", oracle.expectations().per_step_m},
                    {"return_span", pair.return_span(query.k)},
                    {"sandwich_ok", sandwich_all},
                    {"envelope_ok", envelope_ok}};
    return envelope(m, manifest_json(m), std::move(records), std::move(summary));
}

json cmd_certify(const RunManifest& m) {
    const auto s = load_source(m);
    const auto& pair = s.problem.pair;
    const auto query = s.default_query.tree();
    std::optional<ExactOracle> oracle;
    try {
        oracle.emplace(pair, s.problem.policy, query);
    } catch (const BudgetExceeded&) {
        // no exact reference for large instances
    }
    json manifest = manifest_json(m);
    json records = json::array();
    bool lower_inapplicable = false;
    std::optional<double> eps_hat;
    for (double alpha : m.alphas) {
        const auto res = run_certification(pair, s.problem.policy, query, certify_params(m, alpha, m.seed, m.workers));
        manifest["ndelta_uniform"] = res.n_delta_uniform;
        manifest["ndelta_tight"] = res.n_delta_tight;
        manifest["ndelta_derived"] = res.n_delta_derived;
        manifest["ndelta_rule_uniform"] = "ceil(-8 B^2 ln((delta/2)/(4m)) / (v/m)^2)";
        manifest["ndelta_rule_tight"] = "ceil(-ln(((delta/4)/I)/m/2) 2 B^2 / (eta/m)^2)";
        manifest["importance_bound"] = res.importance_bound;
        manifest["terms"] = res.terms;
        manifest["proposal_atoms"] = res.proposal_atoms;
        const double q = oracle ? oracle->q(alpha) : std::nan("");
        for (const auto& b : res.bounds) {
            if (b.kind != BoundKind::TightLower) eps_hat = b.eps_hat;
            if ((b.kind == BoundKind::L1 || b.kind == BoundKind::L2) && !b.applicable) lower_inapplicable = true;
            json r = {{"record", "certified_bound"},
                      {"alpha", alpha},
                      {"kind", to_string(b.kind)},
                      {"applicable", b.applicable},
                      {"case_tag", b.case_tag},
                      {"value", num(b.value)},
                      {"delta", b.delta},
                      {"v", b.v},
                      {"eta", b.eta},
                      {"n_delta_used", b.n_delta_used},
                      {"n_delta_required", b.n_delta_required},
                      {"c_used", b.c_used},
                      {"importance_bound", b.importance_bound},
                      {"eps_hat", num(b.eps_hat)},
                      {"radius", num(b.radius())},
                      {"lambda_1", nullptr},
                      {"lambda_2", nullptr},
                      {"eta_1", nullptr},
                      {"eta_2", nullptr},
                      {"lambda", nullptr},
                      {"v_tight", nullptr},
                      {"q_exact", num(q)},
                      {"violated", oracle && b.applicable ? json(b.violated(q)) : json(nullptr)}};
            for (const auto& [name, value] : b.radii) r[name == "v" ? "v_tight" : name] = num(value);
            records.push_back(std::move(r));
        }
    }
    json summary = {{"eps_hat", eps_hat ? json(*eps_hat) : json(nullptr)},
                    {"epsilon_exact", oracle ? json(oracle->epsilon()) : json(nullptr)},
                    {"exact_available", oracle.has_value()},
                    {"lower_inapplicable", lower_inapplicable}};
    return envelope(m, std::move(manifest), std::move(records), std::move(summary));
}

json cmd_concentration(const RunManifest& m) {
    static const std::vector<std::string> checks = {"brown", "epsilon", "g", "h", "uniform", "tight", "certified", "all"};
    if (std::find(checks.begin(), checks.end(), m.check) == checks.end())
        throw InvalidArgument("unknown --check '" + m.check + "'");
    const auto s = load_source(m);
    const auto& pair = s.problem.pair;
    const auto& policy = s.problem.policy;
    const auto query = s.default_query.tree();
    json manifest = manifest_json(m);
    json records = json::array();
    auto wants = [&](const std::string& c) {
        return m.check == "all" || m.check == c || (m.check == "certified" && (c == "uniform" || c == "tight"));
    };
    if (m.trials == 0) {
        json summary = {{"all_within_delta", true}, {"all_pass_binomial", true}};
        return envelope(m, std::move(manifest), std::move(records), std::move(summary));
    }

    const ExactOracle oracle(pair, policy, query);
    const auto q0 = build_default_proposal(pair, policy, query);
    const double span = pair.return_span(query.k);
    const auto edges = grid_edges(pair, query.k, m.bins);
    const std::uint64_t T = m.trials;
    auto trial_seed = [&](std::uint64_t t) { return derive_seed(m.seed, t); };
    manifest["importance_bound"] = q0.importance_bound();
    manifest["terms"] = q0.terms();

    if (wants("brown")) {
        const auto& dist = oracle.simplified();
        for (double alpha : m.alphas) {
            const double exact = cvar_exact(dist, alpha);
            const auto radii = brown_radii(m.rollouts, alpha, m.delta, 2.0 * span);
            std::vector<double> est(T);
            parallel_for(T, m.workers, [&](std::size_t t) {
                Rng rng = make_stream(trial_seed(t), brown_tag, 0);
                est[t] = cvar_estimate_counts(dist.values(), multinomial_counts(dist.probs(), m.rollouts, rng), alpha);
            });
            std::uint64_t up = 0, lo = 0;
            for (double e : est) {
                up += exact - e > radii.upper;
                lo += e - exact > radii.lower;
            }
            records.push_back(violation_record("brown", "upper_deviation", alpha, {}, T, up, m.delta, m.rollouts));
            records.push_back(violation_record("brown", "lower_deviation", alpha, {}, T, lo, m.delta, m.rollouts));
        }
    }
    if (wants("epsilon")) {
        const auto n = n_delta_for_epsilon(m.v, m.delta, q0.importance_bound(), q0.terms());
        manifest["ndelta_epsilon"] = n;
        std::vector<char> bad(T);
        parallel_for(T, m.workers, [&](std::size_t t) {
            Rng rng = make_stream(trial_seed(t), epsilon_tag, 0);
            bad[t] = std::abs(estimate_epsilon(q0, n, rng).epsilon - oracle.epsilon()) > 2.0 * m.v;
        });
        records.push_back(violation_record("epsilon", "abs_error_gt_2v", {}, {}, T,
                                           static_cast<std::uint64_t>(std::count(bad.begin(), bad.end(), 1)),
                                           m.delta, n));
    }
    if (wants("g") || wants("h")) {
        std::vector<double> g_exact;
        for (double l : edges) g_exact.push_back(oracle.expectations().envelope(l));
        auto run_g = [&](std::uint64_t n) {
            std::vector<std::vector<double>> out(T);
            parallel_for(T, m.workers, [&](std::size_t t) {
                Rng rng = make_stream(trial_seed(t), g_tag, 0);
                out[t] = estimate_g(q0, n, edges, rng);
            });
            return out;
        };
        if (wants("g")) {
            const auto n = n_delta_for_g(m.v, m.delta, q0.importance_bound(), q0.terms());
            manifest["ndelta_g"] = n;
            const auto est = run_g(n);
            for (std::size_t i = 0; i < edges.size(); ++i) {
                std::uint64_t bad = 0;
                for (const auto& g : est) bad += std::abs(g[i] - g_exact[i]) > m.v;
                records.push_back(violation_record("g", "pointwise_abs_error_gt_v", {}, edges[i], T, bad, m.delta, n));
            }
        }
        if (wants("h")) {
            const auto n = n_delta_for_h(m.v, m.delta, q0.importance_bound(), q0.terms(), m.bins);
            manifest["ndelta_h"] = n;
            const auto est = run_g(n);
            std::uint64_t up = 0, lo = 0, order = 0;
            const BinGrid grid(edges);
            for (const auto& g : est) {
                // on bin (k_{i-1}, k_i] h+ is g_hat(k_i) and h- is g_hat(k_{i-1}); g is non-decreasing
                double sup_up = -INFINITY, sup_lo = -INFINITY;
                for (std::size_t i = 0; i < edges.size(); ++i) {
                    sup_up = std::max(sup_up, g_exact[i] - g[i]);
                    sup_lo = std::max(sup_lo, g[i] - g_exact[i]);
                }
                up += sup_up > m.v;
                lo += sup_lo > m.v;
                BinnedEnvelope env(grid, g);
                bool ok = true;
                for (std::size_t i = 0; i < edges.size(); ++i)
                    ok = ok && env.h_minus(edges[i]) <= g[i] && g[i] <= env.h_plus(edges[i]);
                order += !ok;
            }
            records.push_back(violation_record("h", "sup_g_minus_h_plus_gt_v", {}, {}, T, up, m.delta, n, order));
            records.push_back(violation_record("h", "sup_h_minus_minus_g_gt_v", {}, {}, T, lo, m.delta, n, order));
        }
    }
    if (wants("uniform") || wants("tight")) {
        for (double alpha : m.alphas) {
            const double q = oracle.q(alpha);
            std::vector<CertificationResult> res(T);
            parallel_for(T, m.workers, [&](std::size_t t) {
                auto r = run_certification(pair, policy, query, certify_params(m, alpha, trial_seed(t), 1));
                r.returns = {*std::max_element(r.returns.begin(), r.returns.end())};  // only the top is checked later
                res[t] = std::move(r);
            });
            for (BoundKind kind : {BoundKind::L1, BoundKind::L2, BoundKind::U, BoundKind::TightLower}) {
                const bool tight = kind == BoundKind::TightLower;
                if (tight ? !wants("tight") : !wants("uniform")) continue;
                std::uint64_t applicable = 0, bad = 0, invalid = 0, n = 0;
                for (const auto& r : res) {
                    for (const auto& b : r.bounds) {
                        if (b.kind != kind || !b.applicable) continue;
                        ++applicable;
                        bad += b.violated(q);
                        n = b.n_delta_used;
                    }
                    if (tight) invalid += !f_hat_valid(r.f_hat, r.returns, -span);
                }
                if (applicable == 0 && !tight) continue;
                records.push_back(violation_record(tight ? "tight" : "uniform", to_string(kind), alpha, {}, applicable,
                                                   bad, m.delta, n, tight ? std::optional(invalid) : std::nullopt));
            }
        }
    }
    bool within = true, binom = true;
    for (const auto& r : records) {
        within = within && r["within_delta"].get<bool>();
        binom = binom && r["pass_binomial"].get<bool>();
    }
    json summary = {{"all_within_delta", within}, {"all_pass_binomial", binom}, {"epsilon_exact", oracle.epsilon()}};
    return envelope(m, std::move(manifest), std::move(records), std::move(summary));
}

namespace {

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number_float()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

} // namespace

std::string render(const json& report, const std::string& format) {
    if (format == "json") return report.dump(2) + "\n";
    if (format != "csv") throw InvalidArgument("unknown format '" + format + "'");
    std::vector<std::string> header;
    for (const auto& r : report.at("records"))
        for (const auto& [key, value] : r.items())
            if (std::find(header.begin(), header.end(), key) == header.end()) header.push_back(key);
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& r : report.at("records")) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) os << ",";
            if (r.contains(header[i])) os << csv_cell(r.at(header[i]));
        }
        os << "\n";
    }
    return os.str();
}

const json& report_schema() {
    static const json schema = json::parse(R"({
  "type": "object",
  "required": ["schema_version", "command", "manifest", "records", "summary"],
  "properties": {
    "schema_version": {"type": "integer", "const": 1},
    "command": {"type": "string", "enum": ["enumerate", "certify", "concentration"]},
    "manifest": {
      "type": "object",
      "required": ["command", "scenario", "problem", "alpha", "delta", "v", "eta", "rollouts", "particles",
                   "ndelta", "bins", "seed", "trials", "check", "action", "out", "format"],
      "properties": {
        "command": {"type": "string"},
        "alpha": {"type": "array", "items": {"type": "number"}},
        "delta": {"type": "number"},
        "v": {"type": "number"},
        "eta": {"type": "number"},
        "rollouts": {"type": "integer"},
        "particles": {"type": "integer"},
        "bins": {"type": "integer"},
        "seed": {"type": "integer"},
        "format": {"type": "string", "enum": ["json", "csv"]}
      }
    },
    "records": {
      "type": "array",
      "items": {
        "type": "object",
        "flat": true,
        "required": ["record"],
        "properties": {"record": {"type": "string", "enum": ["bound", "distribution", "g", "certified_bound", "violation_rate"]}}
      }
    },
    "summary": {"type": "object", "required": ["n_records"], "properties": {"n_records": {"type": "integer"}}}
  }
})");
    return schema;
}

namespace {

bool has_type(const json& v, const std::string& type) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "integer") return v.is_number_integer() || v.is_number_unsigned();
    if (type == "number") return v.is_number();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    return false;
}

void check_node(const json& v, const json& schema, const std::string& path, std::vector<std::string>& errors) {
    if (schema.contains("type") && !has_type(v, schema["type"].get<std::string>())) {
        errors.push_back(path + ": expected " + schema["type"].get<std::string>());
        return;
    }
    if (schema.contains("const") && v != schema["const"]) errors.push_back(path + ": unexpected value");
    if (schema.contains("enum")) {
        const auto& e = schema["enum"];
        if (std::find(e.begin(), e.end(), v) == e.end()) errors.push_back(path + ": value not allowed");
    }
    if (v.is_object()) {
        for (const auto& key : schema.value("required", json::array()))
            if (!v.contains(key.get<std::string>())) errors.push_back(path + ": missing '" + key.get<std::string>() + "'");
        if (schema.contains("properties"))
            for (const auto& [key, sub] : schema["properties"].items())
                if (v.contains(key)) check_node(v[key], sub, path + "." + key, errors);
        if (schema.value("flat", false))
            for (const auto& [key, value] : v.items())
                if (value.is_object() || value.is_array()) errors.push_back(path + "." + key + ": record is not flat");
    }
    if (v.is_array() && schema.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i)
            check_node(v[i], schema["items"], path + "[" + std::to_string(i) + "]", errors);
}

std::vector<double> parse_alphas(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidArgument("--alpha expects a comma-separated list of numbers, got '" + text + "'");
        }
    }
    if (out.empty()) throw InvalidArgument("--alpha needs at least one value");
    return out;
}

std::optional<std::uint64_t> parse_ndelta(const std::string& text) {
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const auto n = std::stoull(text, &used);
        if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
        return n;
    } catch (const std::exception&) {
        throw InvalidArgument("--ndelta expects a count or 'auto', got '" + text + "'");
    }
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write '" + path + "'");
    f << text;
}

} // namespace

std::vector<std::string> validate_report(const json& report) {
    std::vector<std::string> errors;
    check_node(report, report_schema(), "$", errors);
    return errors;
}

int run(int argc, char** argv) {
    CLI::App app{"Risk-averse POMDP value bounds under a simplified observation and transition model"};
    app.require_subcommand(1);
    RunManifest m;
    m.workers = default_workers();
    std::string alpha_text = "0.25", ndelta_text = "auto";
    int random_states = 3, random_actions = 2, random_obs = 2, random_gap = 3;
    double perturbation = 0.1;
    std::optional<std::uint64_t> random_seed;

    auto add_common = [&](CLI::App* sub) {
        auto* src = sub->add_option("--problem", m.problem_path, "problem file (JSON)");
        sub->add_option("--scenario", m.scenario, "builtin scenario name")->excludes(src);
        sub->add_option("--alpha", alpha_text, "comma-separated confidence levels");
        sub->add_option("--delta", m.delta, "failure probability");
        sub->add_option("--v", m.v, "accuracy of the epsilon and g estimates");
        sub->add_option("--eta", m.eta, "slack added to the estimated envelope");
        sub->add_option("--rollouts", m.rollouts, "rollouts C");
        sub->add_option("--particles", m.particles, "particles per belief N_x");
        sub->add_option("--ndelta", ndelta_text, "delta-belief draws, or 'auto'");
        sub->add_option("--bins", m.bins, "bins I over the return range");
        sub->add_option("--seed", m.seed, "random seed");
        sub->add_option("--action", m.action, "force the first action (Q instead of V)");
        sub->add_option("--out", m.out, "output path (stdout when omitted)");
        sub->add_option("--workers", m.workers, "worker threads (default from RISKBOUND_WORKERS)");
        sub->add_option("--format", m.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };
    auto* enumerate = app.add_subcommand("enumerate", "exact distributions, envelope and value bounds");
    add_common(enumerate);
    auto* certify = app.add_subcommand("certify", "Monte Carlo certified bounds");
    add_common(certify);
    auto* concentration = app.add_subcommand("concentration", "empirical violation rates of the guarantees");
    add_common(concentration);
    concentration->add_option("--trials", m.trials, "independent repetitions");
    concentration->add_option("--check", m.check, "brown, epsilon, g, h, uniform, tight, certified (uniform and tight) or all");
    auto* exporter = app.add_subcommand("export", "write a scenario as a problem file");
    exporter->add_option("--scenario", m.scenario, "builtin scenario name");
    exporter->add_option("--random-seed", random_seed, "write a random instance instead");
    exporter->add_option("--states", random_states);
    exporter->add_option("--actions", random_actions);
    exporter->add_option("--observations", random_obs);
    exporter->add_option("--gap", random_gap, "horizon T - k");
    exporter->add_option("--perturbation", perturbation, "simplified-model mixing weight");
    exporter->add_option("--out", m.out, "problem file path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return invalid_input;
    }

    try {
        if (exporter->parsed()) {
            Problem p = random_seed ? random_instance(*random_seed, random_states, random_actions, random_obs,
                                                      random_gap, perturbation).problem
                                    : builtin(m.scenario).problem;
            save_problem(p, m.out);
            return ok;
        }
        m.alphas = parse_alphas(alpha_text);
        m.ndelta = parse_ndelta(ndelta_text);
        if (m.workers < 1) throw InvalidArgument("--workers must be at least 1");
        json report;
        if (enumerate->parsed()) {
            m.command = "enumerate";
            report = cmd_enumerate(m);
        } else if (certify->parsed()) {
            m.command = "certify";
            report = cmd_certify(m);
        } else {
            m.command = "concentration";
            report = cmd_concentration(m);
        }
        const auto errors = validate_report(report);
        if (!errors.empty()) {
            for (const auto& e : errors) std::cerr << "schema: " << e << "\n";
            return failure;
        }
        write_output(render(report, m.format), m.out);
        if (m.command == "certify" && report["summary"]["lower_inapplicable"].get<bool>()) {
            std::cerr << "error: the lower-bound case for the estimated epsilon is inapplicable\n";
            return inapplicable_case;
        }
        return ok;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return budget_exceeded;
    } catch (const InapplicableCase& e) {
        std::cerr << "error: " << e.what() << "\n";
        return inapplicable_case;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return invalid_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
}

} // namespace riskbound::cli
