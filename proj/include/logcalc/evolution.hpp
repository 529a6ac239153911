#pragma once

// Invertible evolution families U(t,s) built from commuting-class generator
// specifications (constant A, or separable g(t)*A), with closed-form
// evaluators U(t,s) = exp(G(t,s) A), G(t,s) = integral of g from s to t.
// Includes conformance checks for the two-parameter semigroup laws, certified
// growth constants, and difference-quotient generator estimates.
//
// Everything here is finite dimensional: weak and norm limits of difference
// quotients coincide, and the distinction between the state space and a
// denser subspace of better-behaved initial data collapses.

#include <functional>
#include <string>

#include "logcalc/linalg.hpp"
#include "logcalc/scalar_function.hpp"

namespace logcalc {

enum class GeneratorKind { constant, separable };

/// Symbolic description of a time-dependent generator A(t).
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::constant;
    CMatrix a_matrix;
    ScalarFunction g = ScalarFunction::constant(1.0); // separable kind only

    double g_value(double t) const;
    double g_integral(double s, double t) const;
    /// A(t) = g(t) * A (A itself for the constant kind).
    CMatrix a_of(double t) const;
    Eigen::Index dim() const { return a_matrix.rows(); }
};

/// Evaluable two-parameter operator family with certified growth constants:
/// ||U(t,s)|| <= growth_m * e^(growth_beta * t) on the sampled grid.
struct EvolutionFamily {
    GeneratorSpec spec;
    double horizon = 1.0;
    double growth_m = 1.0;
    double growth_beta = 0.0;
    bool commuting = true;
    std::function<CMatrix(double, double)> evaluator;
    std::function<CMatrix(double)> generator;

    Eigen::Index dim() const { return spec.dim(); }
    double growth_bound() const;
};

struct ConformanceReport {
    double max_cocycle_residual = 0.0;
    double max_inverse_residual = 0.0;
    double max_commutation_residual = 0.0;
    std::string grid;
    bool pass = false;
};

struct GrowthEstimate {
    double m = 1.0;
    double beta = 0.0;
};

EvolutionFamily build_family(const GeneratorSpec& spec, double T);

/// U(t, s); exact identity at t == s. Throws OutOfHorizon outside [-T, T].
CMatrix evaluate(const EvolutionFamily& fam, double t, double s);

/// Max cocycle residual ||U(t,r)U(r,s) - U(t,s)|| over grid triples and
/// inverse residual ||U(s,t)U(t,s) - I|| over pairs (plus the commutation of
/// U(t,s) with its inverse). pass iff all residuals <= tol.
ConformanceReport check_semigroup(const EvolutionFamily& fam, int grid_points, double tol);

/// (m, beta) with ||U(t,s)|| <= m e^(beta t) verified on the grid; m is the
/// grid maximum of ||U(t,s)|| e^(-beta t) for the chosen beta.
GrowthEstimate estimate_growth(const EvolutionFamily& fam, int grid_points);

/// Richardson-extrapolated forward difference quotient
/// 2 (U(t+h,t)-I)/h - (U(t+2h,t)-I)/(2h); O(h^2) for smooth families.
CMatrix pregenerator_fd(const EvolutionFamily& fam, double t, double h);

/// Max ||A(t) U(t,s) - U(t,s) A(t)|| over grid pairs.
ConformanceReport check_commutation(const EvolutionFamily& fam, int grid_points, double tol);

/// Negative-control fixture: entry (0,0) of U(t,s) perturbed by epsilon for
/// t != s; breaks the cocycle and inverse laws.
EvolutionFamily make_corrupted(const EvolutionFamily& fam, double epsilon);

/// Negative-control fixture: piecewise family V(t) V(s)^-1 with
/// V(t) = exp(t a_before) for t < 0 and exp(t a_after) for t >= 0. A genuine
/// invertible evolution family, but A(t) does not commute with U(t,s) when
/// a_before and a_after do not commute.
EvolutionFamily make_piecewise_noncommuting(const CMatrix& a_before, const CMatrix& a_after, double T);

} // namespace logcalc
