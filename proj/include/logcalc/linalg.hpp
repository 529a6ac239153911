#pragma once

// Dense complex matrix kernel: resolvents, norms, certified spectral bounds,
// and reference implementations of the matrix exponential (scaling and
// squaring with Pade approximants) and the principal matrix logarithm
// (eigendecomposition with a Schur-based fallback). These serve as the
// independent cross-checks for the contour-integral code paths.

#include <complex>

#include <Eigen/Dense>
#include <json.hpp>

#include "logcalc/errors.hpp"

namespace logcalc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Oracles are validated for desk-scale problems only.
inline constexpr Eigen::Index kMaxOracleDim = 64;

enum class BoundMethod { gershgorin, power_iteration };

/// Certified upper bound on a spectral radius.
struct SpectralBound {
    double radius_upper = 0.0;
    BoundMethod method = BoundMethod::gershgorin;
};

/// (lambda I - m)^-1 by a rank-revealing dense solve.
/// Throws SingularResolvent when lambda sits in (or numerically touches) the spectrum.
CMatrix resolvent(const CMatrix& m, Complex lambda);

/// Induced 2-norm (largest singular value).
double operator_norm(const CMatrix& m);

/// min(Gershgorin row bound, operator norm); always >= the true spectral radius.
SpectralBound spectral_radius_upper(const CMatrix& m);

/// e^m via scaling and squaring with diagonal Pade approximants.
CMatrix matrix_exp(const CMatrix& m);

/// Principal matrix logarithm. Requires the spectrum to stay off (-inf, 0];
/// throws BranchCutViolation when an eigenvalue is within 1e-12 of that ray.
CMatrix matrix_log(const CMatrix& m);

/// Distance from z to the closed ray (-inf, 0] (the Log branch cut).
double distance_to_log_cut(Complex z);

void require_square_finite(const CMatrix& m, const char* what);

/// Exchange format: {"dim": n, "entries": [[re, im], ...]} row-major.
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

} // namespace logcalc
