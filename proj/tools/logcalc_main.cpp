// logcalc: scenario-driven checks for logarithm representations of evolution
// families and the Cauchy problems they solve.
//
//   logcalc <validate|logrep|solve|check|report> --scenario <path> --out <dir>
//           [--tol name=value]... [--margin m] [--seed n]
//
// Exit status: 0 when every enabled check passes, 1 on a failed check,
// 2 on a structural error (bad scenario, propagated numerical error).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logcalc/runner.hpp"
#include "logcalc/version.hpp"

namespace {

struct Options {
    std::string scenario_path;
    std::string out_dir = "out";
    std::vector<std::string> tol_overrides;
    double margin = 0.0;
    long long seed = 0;
    bool seed_set = false;
    bool margin_set = false;
};

void apply_overrides(logcalc::Scenario& sc, const Options& opt) {
    for (const std::string& spec : opt.tol_overrides) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            throw logcalc::SchemaViolation("--tol expects name=value, got \"" + spec + "\"");
        }
        const std::string name = spec.substr(0, eq);
        if (!logcalc::default_tolerances().count(name)) {
            throw logcalc::SchemaViolation("--tol: unknown tolerance name \"" + name + "\"");
        }
        sc.tolerances[name] = std::stod(spec.substr(eq + 1));
    }
    if (opt.margin_set) {
        sc.kappa_policy.margin = opt.margin;
        sc.kappa_policy.explicit_kappa.reset();
    }
    if (opt.seed_set) sc.seed = opt.seed;
}

int run_command(logcalc::Command cmd, const Options& opt) {
    logcalc::Scenario sc;
    try {
        sc = logcalc::parse_scenario(opt.scenario_path);
        apply_overrides(sc, opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    const logcalc::RunReport rep = logcalc::run(cmd, sc, opt.out_dir);

    for (const auto& c : rep.checks) {
        std::printf("[%s] %-24s residual %.3e %s %.3e%s%s\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.residual, c.lower_bound ? ">=" : "<=", c.tolerance,
                    c.note.empty() ? "" : "  # ", c.note.c_str());
    }
    for (const auto& e : rep.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
    std::printf("%s: %s (report in %s)\n", rep.scenario_name.c_str(),
                rep.pass() ? "PASS" : "FAIL", opt.out_dir.c_str());

    if (!rep.errors.empty()) return 2;
    return rep.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"operator logarithm calculus for evolution families"};
    app.set_version_flag("--version", std::string("logcalc ") + logcalc::kVersion);
    app.require_subcommand(1);

    Options opt;
    logcalc::Command cmd = logcalc::Command::check;
    for (const char* name : {"validate", "logrep", "solve", "check", "report"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--scenario", opt.scenario_path, "scenario JSON file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--tol", opt.tol_overrides, "tolerance override name=value");
        sub->add_option("--margin", opt.margin, "kappa margin override")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "seed for randomized grids");
        sub->callback([&opt, &cmd, sub, name] {
            cmd = logcalc::command_from_string(name);
            opt.margin_set = sub->count("--margin") > 0;
            opt.seed_set = sub->count("--seed") > 0;
        });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        return run_command(cmd, opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
