#pragma once

// Scenario-driven check pipelines behind the CLI: family conformance,
// reconstruction sweeps, trajectory solves, and the aggregated report with
// machine-readable outputs (report.json, residuals.csv, trajectories/*.csv).

#include "logcalc/scenario.hpp"

namespace logcalc {

enum class Command { validate, logrep, solve, check, report };

Command command_from_string(const std::string& s);
std::string to_string(Command c);

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    /// Most checks require residual <= tolerance; lower_bound checks require
    /// residual >= tolerance (documented negative properties).
    bool lower_bound = false;
    bool pass = false;
    std::string note;
};

struct RunReport {
    std::string scenario_name;
    std::string version;
    std::string command;
    long long seed = 0;
    std::vector<CheckResult> checks;
    std::map<std::string, double> recorded;   // non-asserted diagnostics
    std::map<std::string, double> timings_ms;
    std::map<std::string, std::string> provenance;
    std::vector<std::string> errors;

    bool pass() const;
};

/// Runs the phases implied by cmd, writes outputs under out_dir.
/// Exceptions become structured error records; the report is always written.
RunReport run(Command cmd, const Scenario& sc, const std::filesystem::path& out_dir);

nlohmann::json report_to_json(const RunReport& r);

} // namespace logcalc
