#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace riskbound::cli {

inline constexpr int schema_version = 1;

enum ExitCode { ok = 0, failure = 1, invalid_input = 2, budget_exceeded = 3, inapplicable_case = 4 };

struct RunManifest {
    std::string command;
    std::string scenario;      ///< builtin name; empty when problem_path is set
    std::string problem_path;
    std::vector<double> alphas = {0.25};
    double delta = 0.1;
    double v = 0.1;
    double eta = 0.1;
    std::size_t rollouts = 2000;
    std::size_t particles = 100;
    std::optional<std::uint64_t> ndelta;  ///< empty means derived from the sample-size formula
    int bins = 10;
    std::uint64_t seed = 1;
    std::size_t trials = 100;
    std::string check = "all";
    std::optional<int> action;
    std::string out;
    std::string format = "json";
    int workers = 1;
};

/// Each command returns the report envelope {schema_version, command, manifest, records, summary}.
nlohmann::json cmd_enumerate(const RunManifest& m);
nlohmann::json cmd_certify(const RunManifest& m);
nlohmann::json cmd_concentration(const RunManifest& m);

/// Serialised report: JSON text, or CSV with one row per record.
std::string render(const nlohmann::json& report, const std::string& format);

/// The embedded schema document.
const nlohmann::json& report_schema();

/// Schema violations of a report; empty when it conforms.
std::vector<std::string> validate_report(const nlohmann::json& report);

/// Command-line entry point; returns the process exit code.
int run(int argc, char** argv);

} // namespace riskbound::cli
