#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fmcf/curve.hpp"
#include "fmcf/flow.hpp"
#include "fmcf/weights.hpp"

namespace fmcf {

/// A requested verification; `params` holds the check's own options.
struct CheckSpec {
    std::string type;
    nlohmann::json params = nlohmann::json::object();
};

/// Reproducible run description loaded from JSON.
///
///   {"name": "...", "description": "...", "seed": 1,
///    "curve": {...}, "weight": {...}, "flow": {...},
///    "checks": ["signs", {"type": "differential_harnack", "variant": "plain"}, ...],
///    "jitter": {"amplitude": 1e-3}, "output_dir": "...", "trace_stride": 0}
struct Scenario {
    std::string name;
    std::string description;
    nlohmann::json curve_spec;
    DiscreteCurve curve;
    WeightField2 weight;
    FlowConfig flow;
    std::vector<CheckSpec> checks;
    std::uint64_t seed = 0;
    double jitter = 0.0;
    std::string output_dir;     ///< relative to the output root unless absolute; defaults to name
    std::size_t trace_stride = 0;  ///< snapshots per trace CSV; 0 picks one that caps the count at 100

    bool has_check(const std::string& type) const;
};

/// Names accepted in `checks`.
const std::vector<std::string>& check_names();

/// Validates and builds a scenario. Throws ConfigError naming the field.
Scenario parse_scenario(const nlohmann::json& spec);

/// Reads and parses a file. JSON syntax errors become ConfigError with the
/// parser's line/column message.
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
    std::filesystem::path out_root = "fmcf_out";
    double tol_scale = 1.0;
    bool run_checks = true;  ///< false: simulate and write the trace only
    bool write_files = true;
};

struct ScenarioResult {
    nlohmann::json summary;
    int exit_code = 0;  ///< 0 all non-vacuous checks pass, 1 otherwise
    std::filesystem::path out_dir;
};

/// Runs the flow and the requested checks, writing
/// trace/*.csv, monitors.csv, harnack_report.json, harnack_summary.csv,
/// integral_harnack.json, residuals.csv, oracle.csv and summary.json.
ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options);

/// Serializes a summary deterministically (sorted keys, shortest round-trip numbers).
std::string dump_summary(const nlohmann::json& summary);

/// Directory holding bundled scenarios: $FMCF_SCENARIOS, else the build-time default.
std::filesystem::path scenario_dir();

/// Bundled scenario files sorted by name.
std::vector<std::filesystem::path> bundled_scenarios();

/// Human-readable statement a check verifies and its hypotheses. Throws
/// InputError for unknown names.
std::string describe_check(const std::string& name);

}  // namespace fmcf
