#include "logcalc/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "logcalc/threading.hpp"

namespace logcalc {

namespace {

std::vector<double> uniform_grid(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        g[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return g;
}

double max_real_eigenvalue(const CMatrix& a) {
    Eigen::ComplexEigenSolver<CMatrix> es(a, false);
    if (es.info() != Eigen::Success) {
        throw NoConvergence("eigenvalue computation failed while certifying growth");
    }
    return es.eigenvalues().real().maxCoeff();
}

// M = max over the grid of ||U(t,s)|| e^(-beta t), clamped to >= 1.
double certify_m(const std::function<CMatrix(double, double)>& evaluator,
                 double T, double beta, int grid_points) {
    const auto grid = uniform_grid(-T, T, grid_points);
    std::vector<double> row_max(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t i) {
        double m = 0.0;
        for (const double s : grid) {
            m = std::max(m, operator_norm(evaluator(grid[i], s)) * std::exp(-beta * grid[i]));
        }
        row_max[i] = m;
    });
    double m = 1.0;
    for (const double v : row_max) m = std::max(m, v);
    return m;
}

void validate_spec(const GeneratorSpec& spec) {
    require_square_finite(spec.a_matrix, "generator spec");
    if (spec.kind == GeneratorKind::separable) {
        switch (spec.g.name) {
            case ScalarFunction::Name::constant:
            case ScalarFunction::Name::cosine:
            case ScalarFunction::Name::poly:
                break;
            default:
                throw std::invalid_argument(
                    "separable generator: g must be const, cos, or poly");
        }
        if (spec.g.name == ScalarFunction::Name::constant && spec.g.params.empty()) {
            throw std::invalid_argument("const g requires one parameter");
        }
    }
}

void require_in_horizon(const EvolutionFamily& fam, double t, const char* what) {
    if (!(t >= -fam.horizon && t <= fam.horizon)) {
        throw OutOfHorizon(std::string(what) + ": time " + std::to_string(t) +
                           " outside [-T, T] with T = " + std::to_string(fam.horizon));
    }
}

} // namespace

double GeneratorSpec::g_value(double t) const {
    return kind == GeneratorKind::constant ? 1.0 : g(t);
}

double GeneratorSpec::g_integral(double s, double t) const {
    return kind == GeneratorKind::constant ? (t - s) : g.antiderivative(t) - g.antiderivative(s);
}

CMatrix GeneratorSpec::a_of(double t) const {
    return g_value(t) * a_matrix;
}

double EvolutionFamily::growth_bound() const {
    return growth_m * std::exp(growth_beta * horizon);
}

EvolutionFamily build_family(const GeneratorSpec& spec, double T) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("build_family: horizon must be positive and finite");
    }
    validate_spec(spec);

    EvolutionFamily fam;
    fam.spec = spec;
    fam.horizon = T;
    fam.commuting = true;
    fam.evaluator = [spec](double t, double s) -> CMatrix {
        const Eigen::Index n = spec.dim();
        if (t == s) return CMatrix::Identity(n, n);
        const double g = spec.g_integral(s, t);
        if (g == 0.0) return CMatrix::Identity(n, n);
        return matrix_exp(g * spec.a_matrix);
    };
    fam.generator = [spec](double t) { return spec.a_of(t); };

    const double sup_g = spec.kind == GeneratorKind::separable ? spec.g.sup_abs(-T, T) : 1.0;
    fam.growth_beta = std::max(0.0, max_real_eigenvalue(spec.a_matrix) * sup_g);
    fam.growth_m = certify_m(fam.evaluator, T, fam.growth_beta, 65);
    return fam;
}

CMatrix evaluate(const EvolutionFamily& fam, double t, double s) {
    require_in_horizon(fam, t, "evaluate");
    require_in_horizon(fam, s, "evaluate");
    if (t == s) return CMatrix::Identity(fam.dim(), fam.dim());
    return fam.evaluator(t, s);
}

ConformanceReport check_semigroup(const EvolutionFamily& fam, int grid_points, double tol) {
    if (grid_points < 3) throw std::invalid_argument("check_semigroup: need at least 3 grid points");
    if (!(tol > 0.0)) throw std::invalid_argument("check_semigroup: tol must be positive");

    const auto grid = uniform_grid(-fam.horizon, fam.horizon, grid_points);
    const std::size_t g = grid.size();
    const Eigen::Index n = fam.dim();
    const CMatrix id = CMatrix::Identity(n, n);

    // Cache all pair evaluations once; triples reuse them.
    std::vector<CMatrix> u(g * g);
    parallel_for(g * g, [&](std::size_t k) {
        u[k] = evaluate(fam, grid[k / g], grid[k % g]);
    });
    const auto at = [&](std::size_t i, std::size_t j) -> const CMatrix& { return u[i * g + j]; };

    std::vector<double> cocycle(g, 0.0), inverse(g, 0.0), commut(g, 0.0);
    parallel_for(g, [&](std::size_t i) {
        double c = 0.0, v = 0.0, w = 0.0;
        for (std::size_t r = 0; r < g; ++r) {
            for (std::size_t s = 0; s < g; ++s) {
                c = std::max(c, operator_norm(at(i, r) * at(r, s) - at(i, s)));
            }
            v = std::max(v, operator_norm(at(r, i) * at(i, r) - id));
            w = std::max(w, operator_norm(at(i, r) * at(r, i) - at(r, i) * at(i, r)));
        }
        cocycle[i] = c;
        inverse[i] = v;
        commut[i] = w;
    });

    ConformanceReport rep;
    for (std::size_t i = 0; i < g; ++i) {
        rep.max_cocycle_residual = std::max(rep.max_cocycle_residual, cocycle[i]);
        rep.max_inverse_residual = std::max(rep.max_inverse_residual, inverse[i]);
        rep.max_commutation_residual = std::max(rep.max_commutation_residual, commut[i]);
    }
    rep.grid = "uniform " + std::to_string(grid_points) + "^3 on [-T, T], T = " +
               std::to_string(fam.horizon);
    rep.pass = rep.max_cocycle_residual <= tol && rep.max_inverse_residual <= tol &&
               rep.max_commutation_residual <= tol;
    return rep;
}

GrowthEstimate estimate_growth(const EvolutionFamily& fam, int grid_points) {
    if (grid_points < 3) throw std::invalid_argument("estimate_growth: need at least 3 grid points");
    GrowthEstimate est;
    const double sup_g = fam.spec.kind == GeneratorKind::separable
                             ? fam.spec.g.sup_abs(-fam.horizon, fam.horizon)
                             : 1.0;
    est.beta = std::max(0.0, max_real_eigenvalue(fam.spec.a_matrix) * sup_g);
    est.m = certify_m(fam.evaluator, fam.horizon, est.beta, grid_points);
    return est;
}

CMatrix pregenerator_fd(const EvolutionFamily& fam, double t, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("pregenerator_fd: h must be positive");
    if (t - 2.0 * h < -fam.horizon || t + 2.0 * h > fam.horizon) {
        throw OutOfHorizon("pregenerator_fd: stencil t +- 2h leaves [-T, T]");
    }
    const Eigen::Index n = fam.dim();
    const CMatrix id = CMatrix::Identity(n, n);
    const CMatrix d1 = (evaluate(fam, t + h, t) - id) / h;
    const CMatrix d2 = (evaluate(fam, t + 2.0 * h, t) - id) / (2.0 * h);
    return 2.0 * d1 - d2;
}

ConformanceReport check_commutation(const EvolutionFamily& fam, int grid_points, double tol) {
    if (grid_points < 2) throw std::invalid_argument("check_commutation: need at least 2 grid points");
    if (!(tol > 0.0)) throw std::invalid_argument("check_commutation: tol must be positive");

    const auto grid = uniform_grid(-fam.horizon, fam.horizon, grid_points);
    std::vector<double> row(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t i) {
        const CMatrix a = fam.generator(grid[i]);
        double m = 0.0;
        for (const double s : grid) {
            const CMatrix u = evaluate(fam, grid[i], s);
            m = std::max(m, operator_norm(a * u - u * a));
        }
        row[i] = m;
    });

    ConformanceReport rep;
    for (const double v : row) rep.max_commutation_residual = std::max(rep.max_commutation_residual, v);
    rep.grid = "uniform " + std::to_string(grid_points) + "^2 on [-T, T], T = " +
               std::to_string(fam.horizon);
    rep.pass = rep.max_commutation_residual <= tol;
    return rep;
}

EvolutionFamily make_corrupted(const EvolutionFamily& fam, double epsilon) {
    EvolutionFamily out = fam;
    const auto base = fam.evaluator;
    out.evaluator = [base, epsilon](double t, double s) -> CMatrix {
        CMatrix u = base(t, s);
        if (t != s) u(0, 0) += epsilon;
        return u;
    };
    return out;
}

EvolutionFamily make_piecewise_noncommuting(const CMatrix& a_before, const CMatrix& a_after,
                                            double T) {
    require_square_finite(a_before, "make_piecewise_noncommuting");
    require_square_finite(a_after, "make_piecewise_noncommuting");
    if (a_before.rows() != a_after.rows()) {
        throw std::invalid_argument("make_piecewise_noncommuting: dimension mismatch");
    }
    if (!(T > 0.0)) throw std::invalid_argument("make_piecewise_noncommuting: T must be positive");

    EvolutionFamily fam;
    fam.spec.kind = GeneratorKind::constant;
    fam.spec.a_matrix = a_after;
    fam.horizon = T;
    fam.commuting = false;

    // U(t,s) = V(t) V(s)^-1 with V(t) = exp(t a_after) for t >= 0, exp(t a_before) below.
    const CMatrix ab = a_before, aa = a_after;
    fam.evaluator = [ab, aa](double t, double s) -> CMatrix {
        const Eigen::Index n = ab.rows();
        if (t == s) return CMatrix::Identity(n, n);
        const CMatrix vt = t >= 0.0 ? matrix_exp(t * aa) : matrix_exp(t * ab);
        const CMatrix vs_inv = s >= 0.0 ? matrix_exp(-s * aa) : matrix_exp(-s * ab);
        return vt * vs_inv;
    };
    fam.generator = [ab, aa](double t) { return t < 0.0 ? ab : aa; };

    const double beta_candidate =
        std::max(max_real_eigenvalue(a_before), max_real_eigenvalue(a_after));
    fam.growth_beta = std::max(0.0, beta_candidate);
    fam.growth_m = certify_m(fam.evaluator, T, fam.growth_beta, 65);
    return fam;
}

} // namespace logcalc
