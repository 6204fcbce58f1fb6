#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tsfrac::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* version = "0.1.0";

enum exit_code : int { ok = 0, usage = 2, domain = 3, violation = 4 };

/// Everything a single invocation needs. Optional fields fall back to
/// per-command defaults inside the runners.
struct RunConfig {
    std::string command;             ///< deriv | integ | chain1 | chain2 | verify | sweep
    std::string target;              ///< verify: holder|cs|rholder|minkowski|jensen|hh|all; sweep: operator name
    std::string scale_text;
    std::string alpha_text;          ///< single value, or start:step:stop
    std::map<std::string, std::string> functions; ///< role (f, g, h, w, nu) -> expression text
    std::optional<double> at;
    std::optional<double> from;
    std::optional<double> to;
    std::optional<double> p;
    double epsilon = 1e-6;
    std::string shape = "auto";      ///< convex | concave | auto
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::string output = "table";
};

/// Result of running one command: the `results` array of the JSON document
/// plus whether any inequality report came back unsatisfied.
struct Outcome {
    json results = json::array();
    bool violation = false;
};

/// Expands "a:step:b" (inclusive, tolerant of rounding at the end) or a
/// single number. Throws invalid_argument for an empty or malformed range.
std::vector<double> parse_alpha_range(const std::string& text);

Outcome run_deriv(const RunConfig& cfg);
Outcome run_integ(const RunConfig& cfg);
Outcome run_chain1(const RunConfig& cfg);
Outcome run_chain2(const RunConfig& cfg);
Outcome run_verify(const RunConfig& cfg);
Outcome run_sweep(const RunConfig& cfg);

/// Dispatches on cfg.command.
Outcome run(const RunConfig& cfg);

/// The full output document {command, config, results, version}.
json document(const RunConfig& cfg, const Outcome& outcome);

/// Serialises with every number written to 17 significant digits.
std::string dump(const json& value);

/// Renders the results as a plain-text table.
std::string render_table(const RunConfig& cfg, const Outcome& outcome);

/// Parses argv, runs, prints, and returns the process exit code. Errors go
/// to `err` as "<ErrorName>: <message>".
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace tsfrac::cli
