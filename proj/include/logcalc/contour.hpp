#pragma once

// Circular integration paths and trapezoidal quadrature of operator-valued
// Cauchy integrals (1/2pi i) * contour integral of f(lambda) (lambda I - M)^-1.
// The trapezoid rule on a circle converges geometrically for integrands
// analytic in an annulus around the path; convergence is certified by node
// doubling with a Richardson gap.

#include "logcalc/linalg.hpp"

namespace logcalc {

/// Circular integration path. node_count is the starting trapezoid resolution
/// (power of two, at least 16).
struct Contour {
    Complex center;
    double radius = 0.0;
    int node_count = 16;
};

/// Scalar integrand selector for dunford_apply.
struct DunfordFunction {
    enum class Kind { constant_one, principal_log, exponential, poly_times_exp };

    Kind kind = Kind::constant_one;
    int degree = 0; // poly_times_exp evaluates lambda^degree * e^lambda

    Complex operator()(Complex lambda) const;

    static DunfordFunction constant_one() { return {Kind::constant_one, 0}; }
    static DunfordFunction principal_log() { return {Kind::principal_log, 0}; }
    static DunfordFunction exponential() { return {Kind::exponential, 0}; }
    static DunfordFunction poly_times_exp(int n) { return {Kind::poly_times_exp, n}; }
};

struct DunfordResult {
    CMatrix value;
    int node_count_used = 0;
    double richardson_gap = 0.0;
    /// radius * max|f(lambda)| * max||resolvent|| over the final node set.
    double norm_bound = 0.0;
};

inline constexpr int kDunfordMaxNodes = 4096;

/// Principal branch: log|z| + i arg(z) with arg in (-pi, pi].
Complex scalar_principal_log(Complex z);

/// Circle centered at kappa with radius (growth_bound + |kappa|)/2. Encloses
/// the disk of radius growth_bound about kappa and excludes the origin.
/// Throws ShiftTooSmall when |kappa| <= growth_bound.
Contour build_contour(Complex kappa, double growth_bound);

/// Trapezoidal evaluation of the Cauchy integral, doubling nodes until the
/// Richardson gap drops below tol. Requires spectrum(m) strictly inside c;
/// violations surface as SingularResolvent or NoConvergence.
DunfordResult dunford_apply(const DunfordFunction& f, const CMatrix& m,
                            const Contour& c, double tol);

/// (2 pi i)^-1 * closed integral of 1/lambda over the circle, N-node trapezoid.
/// Vanishes (up to quadrature error) whenever the circle excludes the origin.
Complex winding_integral(const Contour& c, int node_count);

/// {"center": [re, im], "radius": r, "nodes": n}
nlohmann::json contour_to_json(const Contour& c);

} // namespace logcalc
