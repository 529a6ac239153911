// Python bindings for the main operations: dense kernels, contour quadrature,
// evolution families, logarithm representations, and Cauchy solvers.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "logcalc/runner.hpp"
#include "logcalc/version.hpp"

namespace py = pybind11;
using namespace logcalc;

namespace {

ScalarFunction make_scalar_function(const std::string& name, const std::vector<double>& params) {
    ScalarFunction f;
    f.name = scalar_function_name(name);
    f.params = params;
    if (f.name == ScalarFunction::Name::constant && f.params.size() != 1) {
        throw py::value_error("const takes exactly one parameter");
    }
    return f;
}

GeneratorSpec make_constant_generator(const CMatrix& a) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::constant;
    spec.a_matrix = a;
    return spec;
}

GeneratorSpec make_separable_generator(const CMatrix& a, const std::string& g_name,
                                       const std::vector<double>& params) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::separable;
    spec.a_matrix = a;
    spec.g = make_scalar_function(g_name, params);
    return spec;
}

Forcing make_forcing(const std::vector<std::pair<std::string, std::vector<double>>>& components,
                     double holder_c, double holder_gamma) {
    Forcing f;
    for (const auto& [name, params] : components) {
        f.components.push_back(make_scalar_function(name, params));
    }
    f.holder_c = holder_c;
    f.holder_gamma = holder_gamma;
    return f;
}

CauchyProblem make_problem(const GeneratorSpec& spec, const CVector& u0, double s, double T,
                           const std::optional<Forcing>& forcing) {
    CauchyProblem p;
    p.spec = spec;
    p.initial_state = u0;
    p.initial_time = s;
    p.horizon = T;
    p.forcing = forcing;
    return p;
}

py::dict report_to_dict(const ConformanceReport& r) {
    py::dict d;
    d["max_cocycle_residual"] = r.max_cocycle_residual;
    d["max_inverse_residual"] = r.max_inverse_residual;
    d["max_commutation_residual"] = r.max_commutation_residual;
    d["grid"] = r.grid;
    d["pass"] = r.pass;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "operator logarithm calculus for evolution families";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "LogcalcError");

    // dense kernel
    m.def("resolvent", &resolvent, py::arg("m"), py::arg("lam"));
    m.def("operator_norm", &operator_norm, py::arg("m"));
    m.def("matrix_exp", &matrix_exp, py::arg("m"));
    m.def("matrix_log", &matrix_log, py::arg("m"));
    m.def(
        "spectral_radius_upper",
        [](const CMatrix& mat) {
            const SpectralBound b = spectral_radius_upper(mat);
            return py::make_tuple(b.radius_upper,
                                  b.method == BoundMethod::gershgorin ? "gershgorin"
                                                                      : "power-iteration");
        },
        py::arg("m"));
    m.def("scalar_principal_log", &scalar_principal_log, py::arg("z"));

    // contour quadrature
    py::class_<Contour>(m, "Contour")
        .def_readonly("center", &Contour::center)
        .def_readonly("radius", &Contour::radius)
        .def_readonly("node_count", &Contour::node_count);
    py::class_<DunfordResult>(m, "DunfordResult")
        .def_readonly("value", &DunfordResult::value)
        .def_readonly("node_count_used", &DunfordResult::node_count_used)
        .def_readonly("richardson_gap", &DunfordResult::richardson_gap);
    m.def("build_contour", &build_contour, py::arg("kappa"), py::arg("growth_bound"));
    m.def(
        "dunford_apply",
        [](const std::string& kind, const CMatrix& mat, const Contour& c, double tol, int degree) {
            DunfordFunction f;
            if (kind == "principal-log") {
                f = DunfordFunction::principal_log();
            } else if (kind == "exp") {
                f = DunfordFunction::exponential();
            } else if (kind == "constant-one") {
                f = DunfordFunction::constant_one();
            } else if (kind == "poly-times-exp") {
                f = DunfordFunction::poly_times_exp(degree);
            } else {
                throw py::value_error("unknown integrand kind: " + kind);
            }
            return dunford_apply(f, mat, c, tol);
        },
        py::arg("kind"), py::arg("m"), py::arg("contour"), py::arg("tol"), py::arg("degree") = 0);
    m.def("winding_integral", &winding_integral, py::arg("contour"), py::arg("node_count"));

    // evolution families
    py::class_<GeneratorSpec>(m, "GeneratorSpec")
        .def_property_readonly("dim", &GeneratorSpec::dim)
        .def_property_readonly("a_matrix",
                               [](const GeneratorSpec& s) { return s.a_matrix; })
        .def("a_of", &GeneratorSpec::a_of, py::arg("t"));
    m.def("constant_generator", &make_constant_generator, py::arg("a"));
    m.def("separable_generator", &make_separable_generator, py::arg("a"), py::arg("g_name"),
          py::arg("params") = std::vector<double>{});

    py::class_<EvolutionFamily>(m, "EvolutionFamily")
        .def_property_readonly("horizon", [](const EvolutionFamily& f) { return f.horizon; })
        .def_property_readonly("growth_m", [](const EvolutionFamily& f) { return f.growth_m; })
        .def_property_readonly("growth_beta",
                               [](const EvolutionFamily& f) { return f.growth_beta; })
        .def_property_readonly("commuting", [](const EvolutionFamily& f) { return f.commuting; })
        .def("growth_bound", &EvolutionFamily::growth_bound)
        .def("evaluate", [](const EvolutionFamily& f, double t, double s) { return evaluate(f, t, s); },
             py::arg("t"), py::arg("s"));
    m.def("build_family", &build_family, py::arg("spec"), py::arg("T"));
    m.def(
        "check_semigroup",
        [](const EvolutionFamily& fam, int grid_points, double tol) {
            return report_to_dict(check_semigroup(fam, grid_points, tol));
        },
        py::arg("family"), py::arg("grid_points") = 9, py::arg("tol") = 1e-10);
    m.def(
        "check_commutation",
        [](const EvolutionFamily& fam, int grid_points, double tol) {
            return report_to_dict(check_commutation(fam, grid_points, tol));
        },
        py::arg("family"), py::arg("grid_points") = 9, py::arg("tol") = 1e-10);
    m.def(
        "estimate_growth",
        [](const EvolutionFamily& fam, int grid_points) {
            const GrowthEstimate e = estimate_growth(fam, grid_points);
            return py::make_tuple(e.m, e.beta);
        },
        py::arg("family"), py::arg("grid_points") = 65);
    m.def("pregenerator_fd", &pregenerator_fd, py::arg("family"), py::arg("t"), py::arg("h"));
    m.def("make_corrupted", &make_corrupted, py::arg("family"), py::arg("epsilon"));
    m.def("make_piecewise_noncommuting", &make_piecewise_noncommuting, py::arg("a_before"),
          py::arg("a_after"), py::arg("T"));

    // logarithm representation
    py::class_<KappaShift>(m, "KappaShift")
        .def_readonly("kappa", &KappaShift::kappa)
        .def_readonly("growth_bound", &KappaShift::growth_bound)
        .def_readonly("margin", &KappaShift::margin);
    py::class_<LogRepresentation>(m, "LogRepresentation")
        .def_readonly("a", &LogRepresentation::a)
        .def_readonly("t", &LogRepresentation::t)
        .def_readonly("s", &LogRepresentation::s)
        .def_readonly("node_count_used", &LogRepresentation::node_count_used)
        .def_readonly("richardson_gap", &LogRepresentation::richardson_gap)
        .def_readonly("norm_bound", &LogRepresentation::norm_bound);
    m.def("select_kappa", &select_kappa, py::arg("growth_m"), py::arg("growth_beta"),
          py::arg("T"), py::arg("margin"));
    m.def("shift_for", &shift_for, py::arg("family"), py::arg("margin") = 1.5);
    m.def("log_representation", &log_representation, py::arg("family"), py::arg("shift"),
          py::arg("t"), py::arg("s"), py::arg("tol") = 1e-10);
    m.def("dt_log", &dt_log, py::arg("family"), py::arg("shift"), py::arg("t"), py::arg("s"),
          py::arg("h"), py::arg("tol") = 1e-9);
    m.def("dt_log_closed_form", &dt_log_closed_form, py::arg("family"), py::arg("shift"),
          py::arg("t"), py::arg("s"));
    m.def("reconstruct_generator", &reconstruct_generator, py::arg("family"), py::arg("shift"),
          py::arg("t"), py::arg("s"), py::arg("h"), py::arg("tol") = 1e-9);
    m.def(
        "exp_series",
        [](const CMatrix& a, double tol) {
            const SeriesExp se = exp_series(a, tol);
            return py::make_tuple(se.value, se.terms);
        },
        py::arg("a"), py::arg("tol") = 1e-12);
    m.def("exp_log_roundtrip_check", &exp_log_roundtrip_check, py::arg("family"),
          py::arg("shift"), py::arg("t"), py::arg("s"), py::arg("tol") = 1e-10);

    // Cauchy problems
    py::class_<Forcing>(m, "Forcing")
        .def_readonly("holder_c", &Forcing::holder_c)
        .def_readonly("holder_gamma", &Forcing::holder_gamma)
        .def("__call__", [](const Forcing& f, double t) { return f(t); });
    m.def("forcing", &make_forcing, py::arg("components"), py::arg("holder_c"),
          py::arg("holder_gamma"));

    py::class_<CauchyProblem>(m, "CauchyProblem");
    m.def("cauchy_problem", &make_problem, py::arg("spec"), py::arg("u0"), py::arg("s"),
          py::arg("T"), py::arg("forcing") = std::optional<Forcing>{});

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_property_readonly("states",
                               [](const Trajectory& tr) {
                                   const Eigen::Index dim =
                                       tr.states.empty() ? 0 : tr.states.front().size();
                                   CMatrix out(static_cast<Eigen::Index>(tr.states.size()), dim);
                                   for (std::size_t i = 0; i < tr.states.size(); ++i) {
                                       out.row(static_cast<Eigen::Index>(i)) = tr.states[i];
                                   }
                                   return out;
                               })
        .def_property_readonly("method",
                               [](const Trajectory& tr) { return to_string(tr.method); })
        .def_readonly("tol_achieved", &Trajectory::tol_achieved);
    m.def("solve_autonomous", &solve_autonomous, py::arg("problem"), py::arg("shift"),
          py::arg("tol"), py::arg("output_times"));
    m.def("solve_nonautonomous", &solve_nonautonomous, py::arg("problem"), py::arg("shift"),
          py::arg("tol"), py::arg("output_times"));
    m.def("oracle_solve", &oracle_solve, py::arg("problem"), py::arg("tol"),
          py::arg("output_times"));
    m.def("residual_check", &residual_check, py::arg("trajectory"), py::arg("problem"));
    m.def("dunford_poly_exp", &dunford_poly_exp, py::arg("a"), py::arg("n"), py::arg("tol"));
    m.def("derivative_bound_scan", &derivative_bound_scan, py::arg("family"), py::arg("shift"),
          py::arg("s"), py::arg("n"), py::arg("t_grid"));
    m.def("dyadic_grid", &dyadic_grid, py::arg("k_lo"), py::arg("k_hi"));
    m.def(
        "holder_estimate",
        [](const std::string& name, const std::vector<double>& params,
           const std::vector<double>& grid) {
            const HolderEstimate est = holder_estimate(make_scalar_function(name, params), grid);
            return py::make_tuple(est.c_est, est.gamma_est);
        },
        py::arg("name"), py::arg("params"), py::arg("grid"));

    // scenario harness
    m.def(
        "run_scenario",
        [](const std::string& command, const std::filesystem::path& scenario,
           const std::filesystem::path& out_dir) {
            const Scenario sc = parse_scenario(scenario);
            const RunReport rep = run(command_from_string(command), sc, out_dir);
            return py::make_tuple(rep.pass(), report_to_json(rep).dump());
        },
        py::arg("command"), py::arg("scenario"), py::arg("out_dir"));
}
