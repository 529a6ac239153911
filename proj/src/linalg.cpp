#include "logcalc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace logcalc {

namespace {

double one_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

// Diagonal Pade approximant exp(a) ~ (V - U)^-1 (V + U) for degree <= 9.
CMatrix pade_low(const CMatrix& a, std::initializer_list<double> coeffs) {
    const Eigen::Index n = a.rows();
    const CMatrix a2 = a * a;
    const std::vector<double> b(coeffs);
    CMatrix even = CMatrix::Zero(n, n);
    CMatrix odd = CMatrix::Zero(n, n);
    CMatrix pow = CMatrix::Identity(n, n); // a^(2k)
    for (std::size_t k = 0; 2 * k < b.size(); ++k) {
        if (k > 0) pow = pow * a2;
        even += b[2 * k] * pow;
        if (2 * k + 1 < b.size()) odd += b[2 * k + 1] * pow;
    }
    const CMatrix u = a * odd;
    return (even - u).partialPivLu().solve(even + u);
}

CMatrix pade13(const CMatrix& a) {
    static constexpr double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0,
        40840800.0, 960960.0, 16380.0, 182.0, 1.0};
    const Eigen::Index n = a.rows();
    const CMatrix a2 = a * a;
    const CMatrix a4 = a2 * a2;
    const CMatrix a6 = a4 * a2;
    const CMatrix i = CMatrix::Identity(n, n);
    const CMatrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                           b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * i);
    const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                      b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * i;
    return (v - u).partialPivLu().solve(v + u);
}

// Principal square root of an upper triangular matrix (recurrence over
// superdiagonals). Diagonal entries must stay off (-inf, 0].
CMatrix triangular_sqrt(const CMatrix& t) {
    const Eigen::Index n = t.rows();
    CMatrix s = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) s(i, i) = std::sqrt(t(i, i));
    for (Eigen::Index d = 1; d < n; ++d) {
        for (Eigen::Index i = 0; i + d < n; ++i) {
            const Eigen::Index j = i + d;
            Complex acc = t(i, j);
            for (Eigen::Index k = i + 1; k < j; ++k) acc -= s(i, k) * s(k, j);
            s(i, j) = acc / (s(i, i) + s(j, j));
        }
    }
    return s;
}

// log(I + x) for ||x|| <= 0.25 by the alternating series.
CMatrix log_near_identity(const CMatrix& x) {
    const Eigen::Index n = x.rows();
    CMatrix acc = CMatrix::Zero(n, n);
    CMatrix pow = CMatrix::Identity(n, n);
    for (int k = 1; k <= 64; ++k) {
        pow = pow * x;
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        acc += (sign / k) * pow;
        if (pow.norm() / k < 1e-17) break;
    }
    return acc;
}

void check_branch_cut(const CVector& eigenvalues) {
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        if (distance_to_log_cut(eigenvalues(i)) <= 1e-12) {
            throw BranchCutViolation(
                "eigenvalue within 1e-12 of the ray (-inf, 0]: re=" +
                std::to_string(eigenvalues(i).real()) +
                " im=" + std::to_string(eigenvalues(i).imag()));
        }
    }
}

} // namespace

void require_square_finite(const CMatrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw std::invalid_argument(std::string(what) + ": matrix must be square and nonempty");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
    }
}

double distance_to_log_cut(Complex z) {
    if (z.real() > 0.0) return std::abs(z);
    return std::abs(z.imag());
}

CMatrix resolvent(const CMatrix& m, Complex lambda) {
    require_square_finite(m, "resolvent");
    const Eigen::Index n = m.rows();
    CMatrix shifted = -m;
    shifted.diagonal().array() += lambda;
    Eigen::FullPivLU<CMatrix> lu(shifted);
    if (!lu.isInvertible()) {
        throw SingularResolvent("lambda is in (or numerically near) the spectrum");
    }
    return lu.solve(CMatrix::Identity(n, n));
}

double operator_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    if (!m.allFinite()) throw std::invalid_argument("operator_norm: non-finite entries");
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

SpectralBound spectral_radius_upper(const CMatrix& m) {
    require_square_finite(m, "spectral_radius_upper");
    const double gersh = m.cwiseAbs().rowwise().sum().maxCoeff();
    const double norm = operator_norm(m);
    if (gersh <= norm) return {gersh, BoundMethod::gershgorin};
    return {norm, BoundMethod::power_iteration};
}

CMatrix matrix_exp(const CMatrix& m) {
    require_square_finite(m, "matrix_exp");
    if (m.rows() > kMaxOracleDim) {
        throw std::invalid_argument("matrix_exp: dimension exceeds the supported cap of 64");
    }
    const Eigen::Index n = m.rows();
    const double norm1 = one_norm(m);
    if (norm1 == 0.0) return CMatrix::Identity(n, n);

    // Degree ladder thresholds for double precision (backward error ~ 1e-16).
    constexpr double theta3 = 1.495585217958292e-2;
    constexpr double theta5 = 2.539398330063230e-1;
    constexpr double theta7 = 9.504178996162932e-1;
    constexpr double theta9 = 2.097847961257068;
    constexpr double theta13 = 5.371920351148152;

    if (norm1 <= theta3) return pade_low(m, {120.0, 60.0, 12.0, 1.0});
    if (norm1 <= theta5) return pade_low(m, {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0});
    if (norm1 <= theta7) {
        return pade_low(m, {17297280.0, 8648640.0, 1995840.0, 277200.0,
                            25200.0, 1512.0, 56.0, 1.0});
    }
    if (norm1 <= theta9) {
        return pade_low(m, {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                            30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0});
    }

    const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    CMatrix r = pade13(m / std::pow(2.0, s));
    for (int k = 0; k < s; ++k) r = r * r;
    return r;
}

CMatrix matrix_log(const CMatrix& m) {
    require_square_finite(m, "matrix_log");
    if (m.rows() > kMaxOracleDim) {
        throw std::invalid_argument("matrix_log: dimension exceeds the supported cap of 64");
    }
    const Eigen::Index n = m.rows();

    Eigen::ComplexEigenSolver<CMatrix> es(m, true);
    if (es.info() == Eigen::Success) {
        check_branch_cut(es.eigenvalues());
        const CMatrix& v = es.eigenvectors();
        Eigen::JacobiSVD<CMatrix> svd(v);
        const double smin = svd.singularValues()(n - 1);
        const double cond = smin > 0.0 ? svd.singularValues()(0) / smin
                                       : std::numeric_limits<double>::infinity();
        if (cond < 1e8) {
            CVector logs(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const Complex z = es.eigenvalues()(i);
                logs(i) = Complex(std::log(std::abs(z)),
                                  std::atan2(z.imag() == 0.0 ? 0.0 : z.imag(), z.real()));
            }
            return v * logs.asDiagonal() * v.inverse();
        }
    }

    // Schur fallback: inverse scaling and squaring on the triangular factor.
    Eigen::ComplexSchur<CMatrix> schur(m);
    if (schur.info() != Eigen::Success) {
        throw NoConvergence("matrix_log: Schur decomposition failed");
    }
    CMatrix t = schur.matrixT();
    const CMatrix q = schur.matrixU();
    check_branch_cut(t.diagonal());

    int sqrts = 0;
    constexpr int kMaxSqrts = 48;
    while ((t - CMatrix::Identity(n, n)).norm() > 0.25 && sqrts < kMaxSqrts) {
        t = triangular_sqrt(t);
        ++sqrts;
    }
    if ((t - CMatrix::Identity(n, n)).norm() > 0.25) {
        throw NoConvergence("matrix_log: inverse scaling did not contract to the identity");
    }
    const CMatrix logt = std::pow(2.0, sqrts) * log_near_identity(t - CMatrix::Identity(n, n));
    return q * logt * q.adjoint();
}

nlohmann::json matrix_to_json(const CMatrix& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            entries.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    return {{"dim", m.rows()}, {"entries", std::move(entries)}};
}

CMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaViolation("matrix: expected an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "dim" && key != "entries") {
            throw SchemaViolation("matrix: unknown key \"" + key + "\"");
        }
    }
    if (!j.contains("dim") || !j.contains("entries")) {
        throw SchemaViolation("matrix: requires \"dim\" and \"entries\"");
    }
    const auto dim = j.at("dim").get<Eigen::Index>();
    if (dim < 1) throw SchemaViolation("matrix: dim must be positive");
    const auto& entries = j.at("entries");
    if (!entries.is_array() || entries.size() != static_cast<std::size_t>(dim * dim)) {
        throw SchemaViolation("matrix: entries must hold dim*dim [re, im] pairs");
    }
    CMatrix m(dim, dim);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index jj = 0; jj < dim; ++jj, ++k) {
            const auto& e = entries.at(k);
            if (!e.is_array() || e.size() != 2) {
                throw SchemaViolation("matrix: each entry must be an [re, im] pair");
            }
            m(i, jj) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    if (!m.allFinite()) throw SchemaViolation("matrix: entries must be finite");
    return m;
}

} // namespace logcalc
