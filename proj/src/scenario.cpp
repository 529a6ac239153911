#include "logcalc/scenario.hpp"

#include <fstream>
#include <set>

namespace logcalc {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const char* where) {
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) {
            throw SchemaViolation(std::string(where) + ": unknown key \"" + key + "\"");
        }
    }
}

double require_number(const json& j, const std::string& key, const char* where) {
    if (!j.contains(key)) throw SchemaViolation(std::string(where) + ": missing \"" + key + "\"");
    if (!j.at(key).is_number()) {
        throw SchemaViolation(std::string(where) + ": \"" + key + "\" must be a number");
    }
    return j.at(key).get<double>();
}

ScalarFunction scalar_function_from_json(const json& j, const char* where) {
    if (!j.is_object()) throw SchemaViolation(std::string(where) + ": expected an object");
    reject_unknown_keys(j, {"name", "params"}, where);
    if (!j.contains("name") || !j.at("name").is_string()) {
        throw SchemaViolation(std::string(where) + ": requires a string \"name\"");
    }
    ScalarFunction f;
    f.name = scalar_function_name(j.at("name").get<std::string>());
    f.params.clear();
    if (j.contains("params")) {
        if (!j.at("params").is_array()) {
            throw SchemaViolation(std::string(where) + ": \"params\" must be an array");
        }
        for (const auto& p : j.at("params")) {
            if (!p.is_number()) {
                throw SchemaViolation(std::string(where) + ": params must be numbers");
            }
            f.params.push_back(p.get<double>());
        }
    }
    if (f.name == ScalarFunction::Name::constant && f.params.size() != 1) {
        throw SchemaViolation(std::string(where) + ": const takes exactly one parameter");
    }
    if (f.name == ScalarFunction::Name::poly && f.params.empty()) {
        throw SchemaViolation(std::string(where) + ": poly needs coefficients");
    }
    return f;
}

json scalar_function_to_json(const ScalarFunction& f) {
    return {{"name", to_string(f.name)}, {"params", f.params}};
}

GeneratorSpec generator_from_json(const json& j) {
    if (!j.is_object()) throw SchemaViolation("generator: expected an object");
    reject_unknown_keys(j, {"kind", "A", "g"}, "generator");
    if (!j.contains("kind") || !j.at("kind").is_string()) {
        throw SchemaViolation("generator: requires a string \"kind\"");
    }
    GeneratorSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        spec.kind = GeneratorKind::constant;
    } else if (kind == "separable") {
        spec.kind = GeneratorKind::separable;
    } else {
        throw SchemaViolation("generator: kind must be \"constant\" or \"separable\"");
    }
    if (!j.contains("A")) throw SchemaViolation("generator: missing \"A\"");
    spec.a_matrix = matrix_from_json(j.at("A"));
    if (spec.kind == GeneratorKind::separable) {
        if (!j.contains("g")) throw SchemaViolation("generator: separable kind requires \"g\"");
        spec.g = scalar_function_from_json(j.at("g"), "generator.g");
        if (spec.g.name == ScalarFunction::Name::sqrt_abs) {
            throw SchemaViolation("generator: g must be const, cos, or poly");
        }
    } else if (j.contains("g")) {
        throw SchemaViolation("generator: \"g\" only applies to the separable kind");
    }
    return spec;
}

json generator_to_json(const GeneratorSpec& spec) {
    json j = {{"kind", spec.kind == GeneratorKind::constant ? "constant" : "separable"},
              {"A", matrix_to_json(spec.a_matrix)}};
    if (spec.kind == GeneratorKind::separable) j["g"] = scalar_function_to_json(spec.g);
    return j;
}

Forcing forcing_from_json(const json& j) {
    if (!j.is_object()) throw SchemaViolation("forcing: expected an object");
    reject_unknown_keys(j, {"components", "holder_C", "holder_gamma"}, "forcing");
    if (!j.contains("components") || !j.at("components").is_array() ||
        j.at("components").empty()) {
        throw SchemaViolation("forcing: requires a nonempty \"components\" array");
    }
    Forcing f;
    for (const auto& c : j.at("components")) {
        f.components.push_back(scalar_function_from_json(c, "forcing.components"));
    }
    f.holder_c = require_number(j, "holder_C", "forcing");
    f.holder_gamma = require_number(j, "holder_gamma", "forcing");
    return f;
}

json forcing_to_json(const Forcing& f) {
    json comps = json::array();
    for (const auto& c : f.components) comps.push_back(scalar_function_to_json(c));
    return {{"components", std::move(comps)},
            {"holder_C", f.holder_c},
            {"holder_gamma", f.holder_gamma}};
}

CVector vector_from_json(const json& j, const char* where) {
    if (!j.is_array() || j.empty()) {
        throw SchemaViolation(std::string(where) + ": expected a nonempty array of [re, im] pairs");
    }
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j.at(i);
        if (!e.is_array() || e.size() != 2 || !e.at(0).is_number() || !e.at(1).is_number()) {
            throw SchemaViolation(std::string(where) + ": each entry must be an [re, im] pair");
        }
        v(static_cast<Eigen::Index>(i)) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
    return v;
}

json vector_to_json(const CVector& v) {
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back({v(i).real(), v(i).imag()});
    return j;
}

} // namespace

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> defaults = {
        {"quad", 1e-10},            // Cauchy-integral identity checks
        {"log_agreement", 1e-9},    // contour log vs dense-kernel log
        {"semigroup", 1e-10},
        {"commutation", 1e-10},
        {"growth", 1e-9},           // slack on the growth certificate re-check
        {"pregenerator", 1e-6},     // difference quotient vs declared generator
        {"norm_bound", 1e-12},      // ||a|| against its contour bound
        {"reconstruction", 1e-5},
        {"kappa_invariance", 1e-6},
        {"dtlog", 1e-6},            // finite-difference vs closed-form derivative
        {"dt_quad", 1e-9},          // quadrature tol inside dt_log sweeps
        {"similarity", 1e-6},
        {"roundtrip", 1e-9},
        {"series", 1e-12},          // exp_series truncation tolerance
        {"series_terms", 40},       // max admissible truncation order
        {"solve", 1e-6},            // series trajectory vs oracle
        {"auto_tol", 1e-9},         // autonomous series path tolerance
        {"nonauto", 1e-5},          // Duhamel trajectory vs oracle
        {"duhamel", 1e-7},          // Duhamel quadrature tolerance
        {"oracle", 1e-10},          // oracle RK tolerance
        {"residual_factor", 10},    // multiplier on the per-scenario residual budget
        {"nonsemigroup_gap", 0.01}, // e^a must fail the semigroup law by at least this
    };
    return defaults;
}

double tolerance(const Scenario& sc, const std::string& name) {
    if (const auto it = sc.tolerances.find(name); it != sc.tolerances.end()) return it->second;
    const auto& d = default_tolerances();
    const auto it = d.find(name);
    if (it == d.end()) throw SchemaViolation("unknown tolerance name \"" + name + "\"");
    return it->second;
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw SchemaViolation("scenario: expected a JSON object");
    reject_unknown_keys(j,
                        {"schema", "name", "generator", "T", "kappa_policy", "tolerances",
                         "forcing", "initial", "output_times", "seed", "tamper", "grid_points"},
                        "scenario");
    if (!j.contains("schema") || !j.at("schema").is_number_integer() ||
        j.at("schema").get<int>() != kScenarioSchemaVersion) {
        throw SchemaViolation("scenario: requires \"schema\": 1");
    }
    if (!j.contains("name") || !j.at("name").is_string() || j.at("name").empty()) {
        throw SchemaViolation("scenario: requires a nonempty string \"name\"");
    }

    Scenario sc;
    sc.name = j.at("name").get<std::string>();
    if (!j.contains("generator")) throw SchemaViolation("scenario: missing \"generator\"");
    sc.generator = generator_from_json(j.at("generator"));
    sc.horizon = require_number(j, "T", "scenario");
    if (!(sc.horizon > 0.0)) throw SchemaViolation("scenario: T must be positive");

    if (j.contains("kappa_policy")) {
        const auto& kp = j.at("kappa_policy");
        if (!kp.is_object()) throw SchemaViolation("kappa_policy: expected an object");
        reject_unknown_keys(kp, {"margin", "kappa"}, "kappa_policy");
        if (kp.contains("margin") == kp.contains("kappa")) {
            throw SchemaViolation("kappa_policy: exactly one of \"margin\" or \"kappa\"");
        }
        if (kp.contains("margin")) {
            sc.kappa_policy.margin = require_number(kp, "margin", "kappa_policy");
            if (!(*sc.kappa_policy.margin > 1.0)) {
                throw SchemaViolation("kappa_policy: margin must exceed 1");
            }
        } else {
            const auto& k = kp.at("kappa");
            if (!k.is_array() || k.size() != 2 || !k.at(0).is_number() || !k.at(1).is_number()) {
                throw SchemaViolation("kappa_policy: \"kappa\" must be an [re, im] pair");
            }
            if (k.at(1).get<double>() != 0.0 || !(k.at(0).get<double>() > 0.0)) {
                throw SchemaViolation(
                    "kappa_policy: explicit kappa is restricted to the positive real axis");
            }
            sc.kappa_policy.explicit_kappa = k.at(0).get<double>();
        }
    } else {
        sc.kappa_policy.margin = 1.5;
    }

    if (j.contains("tolerances")) {
        const auto& tols = j.at("tolerances");
        if (!tols.is_object()) throw SchemaViolation("tolerances: expected an object");
        for (const auto& [key, value] : tols.items()) {
            if (!default_tolerances().count(key)) {
                throw SchemaViolation("tolerances: unknown tolerance name \"" + key + "\"");
            }
            if (!value.is_number()) throw SchemaViolation("tolerances: values must be numbers");
            sc.tolerances[key] = value.get<double>();
        }
    }

    if (j.contains("forcing")) {
        sc.forcing = forcing_from_json(j.at("forcing"));
        if (sc.forcing->components.size() != static_cast<std::size_t>(sc.generator.dim())) {
            throw SchemaViolation("forcing: component count must match the generator dimension");
        }
        validate_forcing(*sc.forcing, -sc.horizon, sc.horizon);
    }

    if (j.contains("initial")) {
        const auto& init = j.at("initial");
        if (!init.is_object()) throw SchemaViolation("initial: expected an object");
        reject_unknown_keys(init, {"u", "s"}, "initial");
        if (!init.contains("u")) throw SchemaViolation("initial: missing \"u\"");
        sc.initial_state = vector_from_json(init.at("u"), "initial.u");
        if (sc.initial_state.size() != sc.generator.dim()) {
            throw SchemaViolation("initial: state dimension must match the generator");
        }
        sc.initial_time = init.contains("s") ? require_number(init, "s", "initial") : 0.0;
        if (std::abs(sc.initial_time) > sc.horizon) {
            throw SchemaViolation("initial: s must lie in [-T, T]");
        }
    } else {
        sc.initial_state = CVector::Ones(sc.generator.dim());
        sc.initial_time = 0.0;
    }

    if (j.contains("output_times")) {
        const auto& times = j.at("output_times");
        if (!times.is_array() || times.empty()) {
            throw SchemaViolation("output_times: expected a nonempty array");
        }
        for (const auto& t : times) {
            if (!t.is_number()) throw SchemaViolation("output_times: entries must be numbers");
            const double tv = t.get<double>();
            if (std::abs(tv) > sc.horizon) {
                throw SchemaViolation("output_times: values must lie in [-T, T]");
            }
            if (!sc.output_times.empty() && tv < sc.output_times.back()) {
                throw SchemaViolation("output_times: values must be ascending");
            }
            sc.output_times.push_back(tv);
        }
    } else {
        constexpr int kDefaultTimes = 33;
        for (int i = 0; i < kDefaultTimes; ++i) {
            sc.output_times.push_back(sc.initial_time + (sc.horizon - sc.initial_time) *
                                                            static_cast<double>(i) /
                                                            (kDefaultTimes - 1));
        }
    }

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) {
            throw SchemaViolation("seed: must be an integer");
        }
        sc.seed = j.at("seed").get<long long>();
    }

    if (j.contains("tamper")) {
        const auto& tj = j.at("tamper");
        if (!tj.is_object()) throw SchemaViolation("tamper: expected an object");
        reject_unknown_keys(tj, {"kind", "epsilon"}, "tamper");
        if (!tj.contains("kind") || !tj.at("kind").is_string()) {
            throw SchemaViolation("tamper: requires a string \"kind\"");
        }
        Tamper t;
        const std::string kind = tj.at("kind").get<std::string>();
        if (kind == "corrupt") {
            t.kind = Tamper::Kind::corrupt;
        } else if (kind == "noncommuting") {
            t.kind = Tamper::Kind::noncommuting;
            if (sc.generator.dim() < 2) {
                throw SchemaViolation("tamper: noncommuting requires dimension >= 2");
            }
        } else {
            throw SchemaViolation("tamper: kind must be \"corrupt\" or \"noncommuting\"");
        }
        if (tj.contains("epsilon")) t.epsilon = require_number(tj, "epsilon", "tamper");
        sc.tamper = t;
    }

    if (j.contains("grid_points")) {
        if (!j.at("grid_points").is_number_integer()) {
            throw SchemaViolation("grid_points: must be an integer");
        }
        sc.grid_points = j.at("grid_points").get<int>();
        if (sc.grid_points < 3) throw SchemaViolation("grid_points: must be at least 3");
    }
    return sc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("scenario " + path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

json emit_scenario(const Scenario& sc) {
    json j;
    j["schema"] = kScenarioSchemaVersion;
    j["name"] = sc.name;
    j["generator"] = generator_to_json(sc.generator);
    j["T"] = sc.horizon;
    json kp;
    if (sc.kappa_policy.explicit_kappa) {
        kp["kappa"] = {*sc.kappa_policy.explicit_kappa, 0.0};
    } else {
        kp["margin"] = sc.kappa_policy.margin.value_or(1.5);
    }
    j["kappa_policy"] = std::move(kp);
    if (!sc.tolerances.empty()) j["tolerances"] = sc.tolerances;
    if (sc.forcing) j["forcing"] = forcing_to_json(*sc.forcing);
    j["initial"] = {{"u", vector_to_json(sc.initial_state)}, {"s", sc.initial_time}};
    j["output_times"] = sc.output_times;
    j["seed"] = sc.seed;
    if (sc.tamper) {
        j["tamper"] = {{"kind", sc.tamper->kind == Tamper::Kind::corrupt ? "corrupt"
                                                                         : "noncommuting"},
                       {"epsilon", sc.tamper->epsilon}};
    }
    j["grid_points"] = sc.grid_points;
    return j;
}

} // namespace logcalc
