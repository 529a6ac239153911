#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "logcalc/runner.hpp"

using namespace logcalc;
namespace fs = std::filesystem;

#ifndef LOGCALC_SCENARIO_DIR
#define LOGCALC_SCENARIO_DIR "scenarios"
#endif

namespace {

fs::path scenario_dir() { return fs::path(LOGCALC_SCENARIO_DIR); }

fs::path temp_dir(const char* leaf) {
    const fs::path p = fs::temp_directory_path() / "logcalc_tests" / leaf;
    fs::create_directories(p);
    return p;
}

nlohmann::json minimal_scenario() {
    return {
        {"schema", 1},
        {"name", "tiny"},
        {"generator", {{"kind", "constant"}, {"A", {{"dim", 1}, {"entries", {{1.0, 0.0}}}}}}},
        {"T", 1.0},
    };
}

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("shipped scalar fixture parses to the expected spec") {
    const Scenario sc = parse_scenario(scenario_dir() / "scalar.json");
    CHECK(sc.name == "scalar");
    CHECK(sc.generator.kind == GeneratorKind::constant);
    CHECK(sc.generator.dim() == 1);
    CHECK(sc.generator.a_matrix(0, 0) == Complex(1, 0));
    CHECK(sc.horizon == 1.0);
    CHECK(sc.kappa_policy.margin == 1.5);
    CHECK(sc.output_times.size() == 33);
    CHECK(sc.output_times.front() == 0.0);
    CHECK(sc.output_times.back() == 1.0);
}

TEST_CASE("unknown keys are rejected by name") {
    nlohmann::json j = minimal_scenario();
    j["kapa"] = 3.0;
    try {
        scenario_from_json(j);
        FAIL("expected SchemaViolation");
    } catch (const SchemaViolation& e) {
        CHECK(std::string(e.what()).find("kapa") != std::string::npos);
    }
}

TEST_CASE("defaults fill initial data and output times") {
    const Scenario sc = scenario_from_json(minimal_scenario());
    CHECK(sc.initial_state.size() == 1);
    CHECK(sc.initial_state(0) == Complex(1, 0));
    CHECK(sc.initial_time == 0.0);
    CHECK(sc.kappa_policy.margin == 1.5);
    CHECK(sc.output_times.size() == 33);
    CHECK(sc.grid_points == 9);
}

TEST_CASE("schema validation failures") {
    nlohmann::json j = minimal_scenario();
    j["schema"] = 2;
    CHECK_THROWS_AS(scenario_from_json(j), SchemaViolation);

    j = minimal_scenario();
    j["kappa_policy"] = {{"margin", 1.5}, {"kappa", {3.0, 0.0}}};
    CHECK_THROWS_AS(scenario_from_json(j), SchemaViolation);

    j = minimal_scenario();
    j["kappa_policy"] = {{"kappa", {3.0, 1.0}}}; // off the positive real axis
    CHECK_THROWS_AS(scenario_from_json(j), SchemaViolation);

    j = minimal_scenario();
    j["tolerances"] = {{"no_such_tolerance", 1.0}};
    CHECK_THROWS_AS(scenario_from_json(j), SchemaViolation);

    j = minimal_scenario();
    j["output_times"] = {0.5, 0.25};
    CHECK_THROWS_AS(scenario_from_json(j), SchemaViolation);

    j = minimal_scenario();
    j["tamper"] = {{"kind", "noncommuting"}}; // needs dim >= 2
    CHECK_THROWS_AS(scenario_from_json(j), SchemaViolation);

    j = minimal_scenario();
    j["forcing"] = {{"components", {{{"name", "const"}, {"params", {1.0}}}}},
                    {"holder_C", 0.0},
                    {"holder_gamma", 2.0}};
    CHECK_THROWS_AS(scenario_from_json(j), SchemaViolation);
}

TEST_CASE("declared Holder bounds are checked at parse time") {
    nlohmann::json j = minimal_scenario();
    // a line declared with half its true Lipschitz constant
    j["forcing"] = {{"components", {{{"name", "poly"}, {"params", {0.0, 1.0}}}}},
                    {"holder_C", 0.5},
                    {"holder_gamma", 1.0}};
    CHECK_THROWS_AS(scenario_from_json(j), SchemaViolation);
}

TEST_CASE("sqrt forcing fixture declares a consistent exponent") {
    const Scenario sc = parse_scenario(scenario_dir() / "scalar_forced_sqrt.json");
    REQUIRE(sc.forcing.has_value());
    CHECK(sc.forcing->holder_gamma == 0.5);

    std::vector<double> dyadic{0.0};
    for (int k = 16; k >= 0; --k) dyadic.push_back(std::pow(2.0, -k));
    const HolderEstimate est = holder_estimate(*sc.forcing, dyadic);
    CHECK(est.gamma_est > 0.45);
    CHECK(est.gamma_est < 0.55);
}

TEST_CASE("parse errors carry context") {
    const fs::path bad = temp_dir("parse") / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK_THROWS_AS(parse_scenario(bad), ParseError);
    CHECK_THROWS_AS(parse_scenario(temp_dir("parse") / "missing.json"), ParseError);
}

TEST_CASE("emit-parse round trip is exact for every shipped scenario") {
    for (const auto& entry : fs::directory_iterator(scenario_dir())) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        const Scenario sc = parse_scenario(entry.path());
        const nlohmann::json j1 = emit_scenario(sc);
        const Scenario sc2 = scenario_from_json(j1);
        const nlohmann::json j2 = emit_scenario(sc2);
        CHECK(j1 == j2);
    }
}

TEST_CASE("named tolerances resolve with overrides") {
    Scenario sc = scenario_from_json(minimal_scenario());
    CHECK(tolerance(sc, "reconstruction") == 1e-5);
    sc.tolerances["reconstruction"] = 1e-4;
    CHECK(tolerance(sc, "reconstruction") == 1e-4);
    CHECK_THROWS_AS(tolerance(sc, "bogus"), SchemaViolation);
}

TEST_CASE("run validate produces a report and the exit contract") {
    const Scenario sc = parse_scenario(scenario_dir() / "scalar.json");
    const fs::path out = temp_dir("run_ok");
    const RunReport rep = run(Command::validate, sc, out);
    CHECK(rep.pass());
    CHECK(fs::exists(out / "report.json"));

    const Scenario bad = parse_scenario(scenario_dir() / "corrupted.json");
    const RunReport rep2 = run(Command::validate, bad, temp_dir("run_bad"));
    CHECK_FALSE(rep2.pass());
    bool cocycle_failed = false;
    for (const auto& c : rep2.checks) {
        if (c.name == "cocycle" && !c.pass) cocycle_failed = true;
    }
    CHECK(cocycle_failed);
}

TEST_CASE("report json carries provenance and checks") {
    const Scenario sc = parse_scenario(scenario_dir() / "scalar.json");
    const RunReport rep = run(Command::validate, sc, temp_dir("report_json"));
    const nlohmann::json j = report_to_json(rep);
    CHECK(j.at("scenario") == "scalar");
    CHECK(j.at("pass") == true);
    CHECK(j.at("provenance").contains("kappa"));
    CHECK(j.at("checks").is_array());
    CHECK(!j.at("checks").empty());
}

} // TEST_SUITE
