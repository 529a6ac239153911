#pragma once

// Linear Cauchy problems d/dt u = A(t) u + f(t):
//  - autonomous solves through the power-series representation
//    u(t) = (sum a(t,s)^n / n! - kappa I) u_s,
//  - inhomogeneous solves adding the Duhamel integral of
//    (sum a(t,tau)^n / n! - kappa I) f(tau) with adaptive Gauss-Legendre
//    panels (Holder-continuous forcing suffices),
//  - an independent adaptive Runge-Kutta oracle,
//  - derivative scans and functional-calculus identities for e^a.

#include <optional>
#include <utility>
#include <vector>

#include "logcalc/logrep.hpp"

namespace logcalc {

/// Holder-continuous inhomogeneity, one scalar component per state dimension:
/// ||f(t) - f(s)|| <= holder_c |t - s|^holder_gamma.
struct Forcing {
    std::vector<ScalarFunction> components;
    double holder_c = 0.0;
    double holder_gamma = 1.0;

    CVector operator()(double t) const;
    bool is_zero() const;
};

/// Samples the Holder quotient on a grid and rejects forcings that exceed the
/// declared bound by more than 5% (slack for grid discreteness).
void validate_forcing(const Forcing& f, double t_lo, double t_hi, int grid_points = 33);

struct CauchyProblem {
    GeneratorSpec spec;
    CVector initial_state;
    double initial_time = 0.0;
    double horizon = 1.0;
    std::optional<Forcing> forcing;
    /// Non-commuting test fixtures supply A(t) directly; the series solvers
    /// refuse such problems, the oracle accepts them.
    std::function<CMatrix(double)> generator_override;

    CMatrix generator_at(double t) const;
    bool commuting() const { return !generator_override; }
};

enum class TrajectoryMethod { series, duhamel_series, oracle_rk };

struct Trajectory {
    std::vector<double> times;
    std::vector<CVector> states;
    TrajectoryMethod method = TrajectoryMethod::series;
    double tol_achieved = 0.0;
};

std::string to_string(TrajectoryMethod m);

/// u(t) = (exp_series(a(t,s)) - kappa I) u_s at each output time.
Trajectory solve_autonomous(const CauchyProblem& p, const KappaShift& shift,
                            double tol, const std::vector<double>& output_times);

/// Homogeneous term plus the Duhamel integral, evaluated by adaptive
/// composite Gauss-Legendre (order 8) with dyadic panel refinement.
/// Throws QuadratureStall beyond 2^14 panels.
Trajectory solve_nonautonomous(const CauchyProblem& p, const KappaShift& shift,
                               double tol, const std::vector<double>& output_times);

/// Adaptive embedded Runge-Kutta 5(4) with per-step error control to tol and
/// output at the requested times. Handles non-commuting generators too.
Trajectory oracle_solve(const CauchyProblem& p, double tol,
                        const std::vector<double>& output_times);

/// Max over interior times of ||D_t u - A(t) u - f(t)|| with 4th-order
/// differences; requires a uniform grid of at least 5 points.
double residual_check(const Trajectory& tr, const CauchyProblem& p);

/// Cauchy-integral evaluation of lambda^n e^lambda at a (n in 0..3), over a
/// circle enclosing the certified spectral bound of a. Equals a^n exp(a).
CMatrix dunford_poly_exp(const CMatrix& a, int n, double tol);

/// Scan of (t, t^n ||D_t^n exp_series(a(t,s))||) over a decreasing t grid,
/// derivatives by 4th-order finite differences. n in {1, 2}.
std::vector<std::pair<double, double>>
derivative_bound_scan(const EvolutionFamily& fam, const KappaShift& shift,
                      double s, int n, const std::vector<double>& t_grid);

/// {2^-k : k = k_lo .. k_hi}, decreasing.
std::vector<double> dyadic_grid(int k_lo, int k_hi);

struct HolderEstimate {
    double c_est = 0.0;
    double gamma_est = 1.0;
};

/// Least-squares fit of log||f(t)-f(s)|| against log|t-s| over grid pairs;
/// gamma clipped to (0, 1]. Constant forcings yield (C, gamma) = (0, 1).
HolderEstimate holder_estimate(const Forcing& f, const std::vector<double>& grid);
HolderEstimate holder_estimate(const ScalarFunction& f, const std::vector<double>& grid);

} // namespace logcalc
