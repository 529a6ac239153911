#include "logcalc/logrep.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace logcalc {

namespace {

void require_in_horizon(const EvolutionFamily& fam, double t, const char* what) {
    if (!(t >= -fam.horizon && t <= fam.horizon)) {
        throw OutOfHorizon(std::string(what) + ": time " + std::to_string(t) +
                           " outside [-T, T] with T = " + std::to_string(fam.horizon));
    }
}

CMatrix shifted_family_value(const EvolutionFamily& fam, const KappaShift& shift,
                             double t, double s) {
    CMatrix w = evaluate(fam, t, s);
    w.diagonal().array() += shift.kappa;
    return w;
}

} // namespace

KappaShift select_kappa(double growth_m, double growth_beta, double T, double margin) {
    if (!(margin > 1.0)) {
        throw BadMargin("margin must exceed 1, got " + std::to_string(margin));
    }
    if (!(growth_m > 0.0) || !(T > 0.0) || !std::isfinite(growth_beta)) {
        throw std::invalid_argument("select_kappa: invalid growth constants");
    }
    const double bound = growth_m * std::exp(growth_beta * T);
    return {Complex(margin * bound, 0.0), bound, margin};
}

KappaShift shift_for(const EvolutionFamily& fam, double margin) {
    return select_kappa(fam.growth_m, fam.growth_beta, fam.horizon, margin);
}

LogRepresentation log_representation(const EvolutionFamily& fam, const KappaShift& shift,
                                     double t, double s, double tol) {
    require_in_horizon(fam, t, "log_representation");
    require_in_horizon(fam, s, "log_representation");
    if (!(tol > 0.0)) throw std::invalid_argument("log_representation: tol must be positive");

    LogRepresentation rep;
    rep.t = t;
    rep.s = s;
    rep.shift = shift;
    rep.contour = build_contour(shift.kappa, shift.growth_bound);

    const Eigen::Index n = fam.dim();
    if (t == s) {
        // U(s,s) = I, so a = Log(1 + kappa) I with no quadrature.
        const Complex c = scalar_principal_log(Complex(1.0, 0.0) + shift.kappa);
        rep.a = c * CMatrix::Identity(n, n);
        rep.norm_bound = std::abs(c);
        return rep;
    }

    DunfordResult dr = dunford_apply(DunfordFunction::principal_log(),
                                     shifted_family_value(fam, shift, t, s), rep.contour, tol);
    rep.a = std::move(dr.value);
    rep.node_count_used = dr.node_count_used;
    rep.richardson_gap = dr.richardson_gap;
    rep.norm_bound = dr.norm_bound;
    return rep;
}

CMatrix dt_log(const EvolutionFamily& fam, const KappaShift& shift,
               double t, double s, double h, double tol) {
    constexpr double kMinStep = 1e3 * std::numeric_limits<double>::epsilon();
    if (!(h > 0.0)) throw std::invalid_argument("dt_log: h must be positive");
    if (h < kMinStep) {
        throw StepTooSmall("dt_log: h below 1e3 * unit roundoff; differences would be noise");
    }
    if (t - 2.0 * h < -fam.horizon || t + 2.0 * h > fam.horizon) {
        throw OutOfHorizon("dt_log: stencil t +- 2h leaves [-T, T]");
    }
    const double node_tol = tol / 10.0;
    const CMatrix a_p2 = log_representation(fam, shift, t + 2.0 * h, s, node_tol).a;
    const CMatrix a_p1 = log_representation(fam, shift, t + h, s, node_tol).a;
    const CMatrix a_m1 = log_representation(fam, shift, t - h, s, node_tol).a;
    const CMatrix a_m2 = log_representation(fam, shift, t - 2.0 * h, s, node_tol).a;
    return (-a_p2 + 8.0 * a_p1 - 8.0 * a_m1 + a_m2) / (12.0 * h);
}

CMatrix dt_log_closed_form(const EvolutionFamily& fam, const KappaShift& shift,
                           double t, double s) {
    if (!fam.commuting) {
        throw CommutationViolated("dt_log_closed_form requires a commuting-class family");
    }
    require_in_horizon(fam, t, "dt_log_closed_form");
    require_in_horizon(fam, s, "dt_log_closed_form");
    const Eigen::Index n = fam.dim();
    const CMatrix w = shifted_family_value(fam, shift, t, s);
    const CMatrix w_inv = w.partialPivLu().solve(CMatrix::Identity(n, n));
    return (CMatrix::Identity(n, n) - shift.kappa * w_inv) * fam.generator(t);
}

CMatrix reconstruct_generator(const EvolutionFamily& fam, const KappaShift& shift,
                              double t, double s, double h, double tol) {
    if (!fam.commuting) {
        throw CommutationViolated(
            "reconstruction requires A(t) and U(t,s) to commute; family is flagged otherwise");
    }
    const CMatrix d = dt_log(fam, shift, t, s, h, tol);
    const CMatrix u_inv = evaluate(fam, s, t);
    const Eigen::Index n = fam.dim();
    return (CMatrix::Identity(n, n) + shift.kappa * u_inv) * d;
}

SeriesExp exp_series(const CMatrix& a, double tol) {
    require_square_finite(a, "exp_series");
    if (!(tol > 0.0)) throw std::invalid_argument("exp_series: tol must be positive");
    const Eigen::Index n = a.rows();
    const double na = operator_norm(a);
    if (na == 0.0) return {CMatrix::Identity(n, n), 0};

    // Smallest N with ||a||^(N+1) e^||a|| / (N+1)! <= tol, searched in log space.
    constexpr int kMaxTerms = 200;
    const double log_tol = std::log(tol);
    int terms = -1;
    for (int candidate = 0; candidate <= kMaxTerms; ++candidate) {
        const double log_remainder =
            (candidate + 1) * std::log(na) + na - std::lgamma(candidate + 2.0);
        if (log_remainder <= log_tol) {
            terms = candidate;
            break;
        }
    }
    if (terms < 0) {
        throw NoConvergence("exp_series: remainder bound not met within 200 terms (||a|| = " +
                            std::to_string(na) + ")");
    }

    CMatrix term = CMatrix::Identity(n, n);
    CMatrix acc = CMatrix::Identity(n, n);
    for (int k = 1; k <= terms; ++k) {
        term = term * a / static_cast<double>(k);
        acc += term;
    }
    return {std::move(acc), terms};
}

double exp_log_roundtrip_check(const EvolutionFamily& fam, const KappaShift& shift,
                               double t, double s, double tol) {
    const LogRepresentation rep = log_representation(fam, shift, t, s, tol / 10.0);
    const SeriesExp se = exp_series(rep.a, tol / 10.0);
    return operator_norm(se.value - shifted_family_value(fam, shift, t, s));
}

} // namespace logcalc
