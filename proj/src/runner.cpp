#include "logcalc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "logcalc/threading.hpp"
#include "logcalc/version.hpp"

namespace logcalc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class PhaseTimer {
public:
    explicit PhaseTimer(RunReport& rep, std::string name)
        : rep_(rep), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
    ~PhaseTimer() {
        const auto end = std::chrono::steady_clock::now();
        rep_.timings_ms[name_] =
            std::chrono::duration<double, std::milli>(end - start_).count();
    }

private:
    RunReport& rep_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

void add_check(RunReport& rep, const std::string& name, double residual, double tol,
               bool lower_bound = false, std::string note = {}) {
    CheckResult c;
    c.name = name;
    c.residual = residual;
    c.tolerance = tol;
    c.lower_bound = lower_bound;
    c.pass = lower_bound ? residual >= tol : residual <= tol;
    c.note = std::move(note);
    rep.checks.push_back(std::move(c));
}

void add_skip(RunReport& rep, const std::string& name, std::string note) {
    CheckResult c;
    c.name = name;
    c.pass = true;
    c.note = "skipped: " + std::move(note);
    rep.checks.push_back(std::move(c));
}

EvolutionFamily family_for(const Scenario& sc) {
    EvolutionFamily fam = build_family(sc.generator, sc.horizon);
    if (!sc.tamper) return fam;
    if (sc.tamper->kind == Tamper::Kind::corrupt) {
        return make_corrupted(fam, sc.tamper->epsilon);
    }
    // Pair the scenario generator with a shear it does not commute with.
    CMatrix shear = CMatrix::Zero(sc.generator.dim(), sc.generator.dim());
    shear(0, 1) = Complex(1.0, 0.0);
    return make_piecewise_noncommuting(shear, sc.generator.a_matrix, sc.horizon);
}

std::vector<KappaShift> shifts_for(const Scenario& sc, const EvolutionFamily& fam) {
    if (sc.kappa_policy.explicit_kappa) {
        const double k = *sc.kappa_policy.explicit_kappa;
        const double bound = fam.growth_bound();
        if (k <= bound) {
            throw ShiftTooSmall("explicit kappa " + std::to_string(k) +
                                " does not exceed the growth bound " + std::to_string(bound));
        }
        return {KappaShift{Complex(k, 0.0), bound, k / bound}};
    }
    std::set<double> margins = {1.2, 1.5, 3.0, 10.0};
    margins.insert(sc.kappa_policy.margin.value_or(1.5));
    std::vector<KappaShift> shifts;
    for (const double m : margins) shifts.push_back(shift_for(fam, m));
    return shifts;
}

KappaShift policy_shift(const Scenario& sc, const EvolutionFamily& fam) {
    if (sc.kappa_policy.explicit_kappa) return shifts_for(sc, fam).front();
    return shift_for(fam, sc.kappa_policy.margin.value_or(1.5));
}

// ---------------------------------------------------------------------------
// validate: semigroup laws, commutation, growth certificate, pregenerator.

void phase_validate(const Scenario& sc, const EvolutionFamily& fam, RunReport& rep) {
    PhaseTimer timer(rep, "validate");

    const double tol_sg = tolerance(sc, "semigroup");
    const ConformanceReport sg = check_semigroup(fam, sc.grid_points, tol_sg);
    add_check(rep, "cocycle", sg.max_cocycle_residual, tol_sg, false, sg.grid);
    add_check(rep, "inverse", sg.max_inverse_residual, tol_sg);
    add_check(rep, "inverse_commutation", sg.max_commutation_residual, tol_sg);

    const double tol_comm = tolerance(sc, "commutation");
    const ConformanceReport comm = check_commutation(fam, sc.grid_points, tol_comm);
    add_check(rep, "generator_commutation", comm.max_commutation_residual, tol_comm);

    // Re-verify || U(t,s) || <= M e^(beta t) on a grid 4x finer than estimation.
    {
        const GrowthEstimate est = estimate_growth(fam, 65);
        const int fine = 257;
        std::vector<double> worst(static_cast<std::size_t>(fine), 0.0);
        parallel_for(worst.size(), [&](std::size_t i) {
            const double t = -fam.horizon + 2.0 * fam.horizon * static_cast<double>(i) / (fine - 1);
            double w = 0.0;
            for (int jj = 0; jj < fine; ++jj) {
                const double s = -fam.horizon + 2.0 * fam.horizon * jj / (fine - 1.0);
                w = std::max(w, operator_norm(evaluate(fam, t, s)) * std::exp(-est.beta * t));
            }
            worst[i] = w;
        });
        double peak = 0.0;
        for (const double w : worst) peak = std::max(peak, w);
        add_check(rep, "growth_certificate", std::max(0.0, peak - est.m),
                  tolerance(sc, "growth"), false,
                  "M=" + fmt(est.m) + " beta=" + fmt(est.beta));
        rep.recorded["growth_m"] = est.m;
        rep.recorded["growth_beta"] = est.beta;
    }

    // Difference-quotient estimate against the declared generator.
    {
        const double t0 = fam.horizon / 4.0;
        const double h = 1e-4 * std::max(1.0, fam.horizon);
        const CMatrix approx = pregenerator_fd(fam, t0, h);
        const double resid = operator_norm(approx - fam.generator(t0));
        add_check(rep, "pregenerator", resid, tolerance(sc, "pregenerator"));
    }
}

// ---------------------------------------------------------------------------
// logrep: reconstruction sweep over (t,s) pairs and shifts.

struct SweepRow {
    double t = 0.0;
    double s = 0.0;
    double kappa = 0.0;
    double resid_reconstruction = 0.0;
    double resid_roundtrip = 0.0;
    int nodes_used = 0;

    double resid_dtlog = 0.0;
    double resid_similarity = 0.0;
    double resid_norm_bound = 0.0;
    double recon_entry_norm = 0.0;
    int series_terms = 0;
    CMatrix reconstructed;
};

void phase_logrep(const Scenario& sc, const EvolutionFamily& fam, RunReport& rep,
                  std::vector<SweepRow>& rows) {
    PhaseTimer timer(rep, "logrep");
    if (!fam.commuting) {
        throw CommutationViolated(
            "logrep sweep requires a commuting-class family (scenario is tampered)");
    }

    const double T = fam.horizon;
    const double h = 1e-3 * T;
    const int g = sc.grid_points;

    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < g; ++i) {
        const double t = (-T + 2.5 * h) + (2.0 * T - 5.0 * h) * i / (g - 1.0);
        for (int j = 0; j < g; ++j) {
            pairs.emplace_back(t, -T + 2.0 * T * j / (g - 1.0));
        }
    }
    // Seeded extra pairs: the scenario's randomized grid.
    std::mt19937_64 rng(static_cast<std::uint64_t>(sc.seed));
    std::uniform_real_distribution<double> ut(-T + 2.5 * h, T - 2.5 * h);
    std::uniform_real_distribution<double> us(-T, T);
    for (int k = 0; k < 8; ++k) {
        const double t = ut(rng);
        pairs.emplace_back(t, us(rng));
    }

    const std::vector<KappaShift> shifts = shifts_for(sc, fam);
    const double quad_tol = tolerance(sc, "dt_quad");
    const double rep_tol = 1e-12;
    const double series_tol = tolerance(sc, "series");

    rows.assign(pairs.size() * shifts.size(), SweepRow{});
    parallel_for(rows.size(), [&](std::size_t idx) {
        const auto& [t, s] = pairs[idx / shifts.size()];
        const KappaShift& shift = shifts[idx % shifts.size()];
        SweepRow row;
        row.t = t;
        row.s = s;
        row.kappa = shift.kappa.real();

        const LogRepresentation lr = log_representation(fam, shift, t, s, rep_tol);
        row.nodes_used = lr.node_count_used;
        row.resid_norm_bound = std::max(0.0, operator_norm(lr.a) - lr.norm_bound);

        const SeriesExp se = exp_series(lr.a, series_tol);
        row.series_terms = se.terms;
        CMatrix shifted = evaluate(fam, t, s);
        shifted.diagonal().array() += shift.kappa;
        row.resid_roundtrip = operator_norm(se.value - shifted);

        const CMatrix d_fd = dt_log(fam, shift, t, s, h, quad_tol);
        const CMatrix d_cf = dt_log_closed_form(fam, shift, t, s);
        row.resid_dtlog = operator_norm(d_fd - d_cf);

        const Eigen::Index n = fam.dim();
        const CMatrix u_inv = evaluate(fam, s, t);
        row.reconstructed = (CMatrix::Identity(n, n) + shift.kappa * u_inv) * d_fd;
        row.resid_reconstruction = operator_norm(row.reconstructed - fam.generator(t));
        row.recon_entry_norm = operator_norm(d_fd);

        row.resid_similarity = operator_norm(d_fd * shifted - evaluate(fam, t, s) * fam.generator(t));
        rows[idx] = std::move(row);
    });

    double max_recon = 0.0, max_round = 0.0, max_dt = 0.0, max_sim = 0.0, max_bound = 0.0;
    int max_terms = 0, max_nodes = 0;
    for (const auto& r : rows) {
        max_recon = std::max(max_recon, r.resid_reconstruction);
        max_round = std::max(max_round, r.resid_roundtrip);
        max_dt = std::max(max_dt, r.resid_dtlog);
        max_sim = std::max(max_sim, r.resid_similarity);
        max_bound = std::max(max_bound, r.resid_norm_bound);
        max_terms = std::max(max_terms, r.series_terms);
        max_nodes = std::max(max_nodes, r.nodes_used);
    }
    add_check(rep, "reconstruction", max_recon, tolerance(sc, "reconstruction"));
    add_check(rep, "roundtrip", max_round, tolerance(sc, "roundtrip"));
    add_check(rep, "dtlog_closed_form", max_dt, tolerance(sc, "dtlog"));
    add_check(rep, "similarity_identity", max_sim, tolerance(sc, "similarity"));
    add_check(rep, "log_norm_bound", max_bound, tolerance(sc, "norm_bound"));
    add_check(rep, "series_terms", max_terms, tolerance(sc, "series_terms"), false,
              "max truncation order at series tol " + fmt(series_tol));
    rep.recorded["max_nodes_used"] = max_nodes;

    if (shifts.size() > 1) {
        double spread = 0.0;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            for (std::size_t i = 0; i < shifts.size(); ++i) {
                for (std::size_t j = i + 1; j < shifts.size(); ++j) {
                    spread = std::max(spread, operator_norm(
                        rows[p * shifts.size() + i].reconstructed -
                        rows[p * shifts.size() + j].reconstructed));
                }
            }
        }
        add_check(rep, "kappa_invariance", spread, tolerance(sc, "kappa_invariance"));
    } else {
        add_skip(rep, "kappa_invariance", "single explicit kappa");
    }

    // Contour identities at representative pairs, worst case over shifts.
    {
        const double tol_quad = tolerance(sc, "quad");
        const std::vector<std::pair<double, double>> probes = {
            pairs.front(), pairs[pairs.size() / 2], pairs[sc.grid_points / 2]};
        double cauchy_resid = 0.0, winding_resid = 0.0, agree_resid = 0.0;
        for (const auto& shift : shifts) {
            const Contour c = build_contour(shift.kappa, shift.growth_bound);
            winding_resid = std::max(winding_resid, std::abs(winding_integral(c, 512)));
            for (const auto& [t, s] : probes) {
                CMatrix shifted = evaluate(fam, t, s);
                shifted.diagonal().array() += shift.kappa;
                const DunfordResult one =
                    dunford_apply(DunfordFunction::constant_one(), shifted, c, tol_quad);
                cauchy_resid = std::max(cauchy_resid, operator_norm(
                    one.value - CMatrix::Identity(fam.dim(), fam.dim())));
                const DunfordResult lg =
                    dunford_apply(DunfordFunction::principal_log(), shifted, c, tol_quad);
                agree_resid = std::max(agree_resid, operator_norm(lg.value - matrix_log(shifted)));
            }
        }
        add_check(rep, "cauchy_identity", cauchy_resid, tol_quad);
        add_check(rep, "zero_winding", winding_resid, tol_quad);
        add_check(rep, "log_oracle_agreement", agree_resid, tolerance(sc, "log_agreement"));
    }

    // e^a must not inherit the semigroup law (documented negative property).
    {
        const KappaShift& shift = shifts.front();
        const double t = T / 2.0, r = T / 8.0, s = -T / 2.0;
        const auto ea = [&](double x, double y) {
            return exp_series(log_representation(fam, shift, x, y, rep_tol).a, series_tol).value;
        };
        const double gap = operator_norm(ea(t, r) * ea(r, s) - ea(t, s));
        add_check(rep, "exp_nonsemigroup", gap, tolerance(sc, "nonsemigroup_gap"), true,
                  "residual must stay above the bound");
    }

    // Recorded, not asserted: the two sides of the n-th derivative identity and
    // the shift dependence of the derivative of the logarithm.
    {
        const auto& [t, s] = pairs[pairs.size() / 2];
        for (std::size_t i = 0; i < shifts.size(); ++i) {
            const CMatrix d_fd = dt_log(fam, shifts[i], t, s, h, quad_tol);
            rep.recorded["dtlog_norm_margin_" + fmt(shifts[i].margin)] = operator_norm(d_fd);
        }
        const KappaShift& shift = shifts.front();
        const auto ea = [&](double x) {
            return exp_series(log_representation(fam, shift, x, s, rep_tol).a, series_tol).value;
        };
        const CMatrix fd1 =
            (ea(t - 2.0 * h) - 8.0 * ea(t - h) + 8.0 * ea(t + h) - ea(t + 2.0 * h)) / (12.0 * h);
        const CMatrix a_ts = log_representation(fam, shift, t, s, rep_tol).a;
        rep.recorded["dunford_vs_dt_exp_n1"] =
            operator_norm(fd1 - dunford_poly_exp(a_ts, 1, tolerance(sc, "quad")));
    }
}

// ---------------------------------------------------------------------------
// solve: series and oracle trajectories, comparison, residual budget.

struct SolveArtifacts {
    Trajectory series;
    Trajectory oracle;
};

CauchyProblem problem_for(const Scenario& sc, const EvolutionFamily& fam) {
    CauchyProblem p;
    p.spec = sc.generator;
    p.initial_state = sc.initial_state;
    p.initial_time = sc.initial_time;
    p.horizon = sc.horizon;
    p.forcing = sc.forcing;
    if (sc.tamper && sc.tamper->kind == Tamper::Kind::noncommuting) {
        p.generator_override = fam.generator;
    }
    return p;
}

void phase_solve(const Scenario& sc, const EvolutionFamily& fam, RunReport& rep,
                 SolveArtifacts& out) {
    PhaseTimer timer(rep, "solve");
    const CauchyProblem p = problem_for(sc, fam);
    const KappaShift shift = policy_shift(sc, fam);
    const std::vector<double>& times = sc.output_times;

    out.oracle = oracle_solve(p, tolerance(sc, "oracle"), times);

    const bool forced = p.forcing && !p.forcing->is_zero();
    const double path_tol = forced ? tolerance(sc, "duhamel") : tolerance(sc, "auto_tol");
    out.series = forced ? solve_nonautonomous(p, shift, path_tol, times)
                        : (p.forcing ? solve_nonautonomous(p, shift, path_tol, times)
                                     : solve_autonomous(p, shift, path_tol, times));

    double dev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        dev = std::max(dev, (out.series.states[i] - out.oracle.states[i]).norm());
    }
    add_check(rep, "solve_match", dev, tolerance(sc, forced ? "nonauto" : "solve"),
              false, forced ? "duhamel-series vs oracle" : "series vs oracle");

    if (p.forcing && p.forcing->is_zero()) {
        const Trajectory plain = solve_autonomous(
            [&] { CauchyProblem q = p; q.forcing.reset(); return q; }(), shift, path_tol, times);
        double gap = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            gap = std::max(gap, (out.series.states[i] - plain.states[i]).norm());
        }
        add_check(rep, "duhamel_consistency", gap, tolerance(sc, "duhamel"));
    }

    // Residual of the produced trajectory against the differential equation,
    // budgeted by the finite-difference truncation plus solver tolerance.
    bool uniform = times.size() >= 5;
    const double hstep = times.size() > 1 ? times[1] - times[0] : 0.0;
    for (std::size_t i = 1; uniform && i < times.size(); ++i) {
        if (std::abs(times[i] - times[i - 1] - hstep) > 1e-9 * std::max(1.0, std::abs(hstep))) {
            uniform = false;
        }
    }
    const bool holder_rough = p.forcing && p.forcing->holder_gamma < 1.0;
    if (uniform && hstep > 0.0 && !holder_rough) {
        const double residual = residual_check(out.series, p);
        const double g_sup = sc.generator.kind == GeneratorKind::separable
                                 ? sc.generator.g.sup_abs(-sc.horizon, sc.horizon)
                                 : 1.0;
        const double a_scale = operator_norm(sc.generator.a_matrix) * g_sup;
        double u_max = 0.0;
        for (const auto& st : out.series.states) u_max = std::max(u_max, st.norm());
        double f_sup = 0.0;
        if (p.forcing) {
            for (const double t : times) f_sup = std::max(f_sup, (*p.forcing)(t).norm());
        }
        const double fifth = std::pow(a_scale, 5) * u_max +
                             (5.0 * std::pow(a_scale, 4) + 1.0) * f_sup;
        const double budget = tolerance(sc, "residual_factor") *
                              (std::pow(hstep, 4) * fifth / 30.0 + 1.5 * path_tol / hstep);
        add_check(rep, "trajectory_residual", residual, budget, false,
                  "budget = factor * (FD truncation + solver tol)");
    } else {
        add_skip(rep, "trajectory_residual",
                 holder_rough ? "forcing only Holder continuous; FD residual not meaningful"
                              : "output times not a uniform grid of >= 5 points");
    }

    if (p.forcing && !p.forcing->is_zero()) {
        const std::vector<double> fit_grid = [&] {
            std::vector<double> g{0.0};
            for (int k = 16; k >= 0; --k) g.push_back(std::pow(2.0, -k) * sc.horizon);
            return g;
        }();
        const HolderEstimate est = holder_estimate(*p.forcing, fit_grid);
        rep.recorded["holder_gamma_est"] = est.gamma_est;
        rep.recorded["holder_c_est"] = est.c_est;
    }
}

// ---------------------------------------------------------------------------
// output files

void write_residuals_csv(const fs::path& out_dir, const std::vector<SweepRow>& rows) {
    std::ofstream out(out_dir / "residuals.csv", std::ios::binary);
    out << "t,s,kappa,residual_reconstruction,residual_roundtrip,nodes_used\n";
    for (const auto& r : rows) {
        out << fmt(r.t) << ',' << fmt(r.s) << ',' << fmt(r.kappa) << ','
            << fmt(r.resid_reconstruction) << ',' << fmt(r.resid_roundtrip) << ','
            << r.nodes_used << '\n';
    }
}

void write_trajectory_csv(const fs::path& path, const Trajectory& tr) {
    std::ofstream out(path, std::ios::binary);
    const Eigen::Index dim = tr.states.empty() ? 0 : tr.states.front().size();
    out << "time";
    for (Eigen::Index i = 0; i < dim; ++i) {
        out << ",re(u_" << (i + 1) << "),im(u_" << (i + 1) << ")";
    }
    out << ",method,tol_achieved\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        out << fmt(tr.times[k]);
        for (Eigen::Index i = 0; i < dim; ++i) {
            out << ',' << fmt(tr.states[k](i).real()) << ',' << fmt(tr.states[k](i).imag());
        }
        out << ',' << to_string(tr.method) << ',' << fmt(tr.tol_achieved) << '\n';
    }
}

} // namespace

Command command_from_string(const std::string& s) {
    if (s == "validate") return Command::validate;
    if (s == "logrep") return Command::logrep;
    if (s == "solve") return Command::solve;
    if (s == "check") return Command::check;
    if (s == "report") return Command::report;
    throw std::invalid_argument("unknown command: " + s);
}

std::string to_string(Command c) {
    switch (c) {
        case Command::validate: return "validate";
        case Command::logrep: return "logrep";
        case Command::solve: return "solve";
        case Command::check: return "check";
        case Command::report: return "report";
    }
    throw std::logic_error("unreachable command");
}

bool RunReport::pass() const {
    if (!errors.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

RunReport run(Command cmd, const Scenario& sc, const fs::path& out_dir) {
    RunReport rep;
    rep.scenario_name = sc.name;
    rep.version = kVersion;
    rep.command = to_string(cmd);
    rep.seed = sc.seed;

    fs::create_directories(out_dir);

    std::vector<SweepRow> rows;
    SolveArtifacts solved;
    bool wrote_rows = false, wrote_traj = false;

    try {
        const EvolutionFamily fam = family_for(sc);
        const KappaShift shift = policy_shift(sc, fam);
        rep.provenance["growth_bound"] = fmt(fam.growth_bound());
        rep.provenance["kappa"] = fmt(shift.kappa.real());
        rep.provenance["margin"] = fmt(shift.margin);
        rep.provenance["contour"] =
            contour_to_json(build_contour(shift.kappa, shift.growth_bound)).dump();
        rep.provenance["dt_h"] = fmt(1e-3 * sc.horizon);
        rep.provenance["grid_points"] = std::to_string(sc.grid_points);

        const bool all = cmd == Command::check || cmd == Command::report;
        if (cmd == Command::validate || all) phase_validate(sc, fam, rep);
        if (cmd == Command::logrep || all) {
            phase_logrep(sc, fam, rep, rows);
            wrote_rows = true;
        }
        if (cmd == Command::solve || all) {
            phase_solve(sc, fam, rep, solved);
            wrote_traj = true;
        }
    } catch (const std::exception& e) {
        rep.errors.emplace_back(e.what());
    }

    try {
        if (wrote_rows) write_residuals_csv(out_dir, rows);
        if (wrote_traj) {
            fs::create_directories(out_dir / "trajectories");
            write_trajectory_csv(out_dir / "trajectories" / (sc.name + "_series.csv"),
                                 solved.series);
            write_trajectory_csv(out_dir / "trajectories" / (sc.name + "_oracle.csv"),
                                 solved.oracle);
        }
        std::ofstream out(out_dir / "report.json", std::ios::binary);
        out << report_to_json(rep).dump(2) << '\n';
    } catch (const std::exception& e) {
        rep.errors.emplace_back(std::string("while writing outputs: ") + e.what());
    }
    return rep;
}

json report_to_json(const RunReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        json jc = {{"name", c.name},
                   {"residual", c.residual},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}};
        if (c.lower_bound) jc["lower_bound"] = true;
        if (!c.note.empty()) jc["note"] = c.note;
        checks.push_back(std::move(jc));
    }
    return {{"schema", 1},
            {"scenario", r.scenario_name},
            {"version", r.version},
            {"command", r.command},
            {"seed", r.seed},
            {"pass", r.pass()},
            {"checks", std::move(checks)},
            {"recorded", r.recorded},
            {"timings_ms", r.timings_ms},
            {"provenance", r.provenance},
            {"errors", r.errors}};
}

} // namespace logcalc
