#pragma once

// Scenario files: versioned JSON descriptions of a generator, horizon, shift
// policy, tolerances, optional forcing and initial data. Unknown keys are
// rejected. parse(emit(sc)) round-trips exactly.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "logcalc/cauchy.hpp"

namespace logcalc {

inline constexpr int kScenarioSchemaVersion = 1;

/// Either a margin for the default positive-real policy or an explicit kappa
/// (restricted to the positive real axis).
struct KappaPolicy {
    std::optional<double> margin;
    std::optional<double> explicit_kappa;
};

/// Deliberate defect injected for negative-control scenarios.
struct Tamper {
    enum class Kind { corrupt, noncommuting };
    Kind kind = Kind::corrupt;
    double epsilon = 1e-3;
};

struct Scenario {
    std::string name;
    GeneratorSpec generator;
    double horizon = 1.0;
    KappaPolicy kappa_policy;
    std::map<std::string, double> tolerances; // overrides of the named defaults
    std::optional<Forcing> forcing;
    CVector initial_state; // defaults to ones
    double initial_time = 0.0;
    std::vector<double> output_times; // defaults to 33 points in [s, T]
    long long seed = 0;
    std::optional<Tamper> tamper;
    int grid_points = 9;
};

/// Registry of named tolerances with their defaults; scenario files and
/// --tol overrides may only reference these names.
const std::map<std::string, double>& default_tolerances();
double tolerance(const Scenario& sc, const std::string& name);

Scenario parse_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json emit_scenario(const Scenario& sc);

} // namespace logcalc
