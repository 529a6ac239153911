#pragma once

// Logarithm representation of evolution families: spectral-shift selection,
// a(t,s) = Log(U(t,s) + kappa I) via contour quadrature, its t-derivative by
// finite differences with an algebraic closed-form cross-check
// (I - kappa (U + kappa I)^-1) A(t), generator reconstruction
// A(t) = (I + kappa U(s,t)) d/dt a(t,s), and the truncated power series of
// e^a with a certified remainder bound.

#include "logcalc/contour.hpp"
#include "logcalc/evolution.hpp"

namespace logcalc {

/// Spectral shift kappa together with the growth bound it strictly exceeds.
/// Default policy: kappa positive real, kappa = margin * growth_bound.
struct KappaShift {
    Complex kappa;
    double growth_bound = 0.0;
    double margin = 1.5;
};

struct LogRepresentation {
    CMatrix a;       // Log(U(t,s) + kappa I)
    CMatrix da_dt;   // left empty (0x0) until a caller fills it from dt_log
    double t = 0.0;
    double s = 0.0;
    KappaShift shift;
    Contour contour;
    int node_count_used = 0;
    double richardson_gap = 0.0;
    double norm_bound = 0.0; // radius * max|Log lambda| * max||resolvent||
};

struct SeriesExp {
    CMatrix value;
    int terms = 0;
};

/// kappa = margin * m * e^(beta T) on the positive real axis.
/// Throws BadMargin when margin <= 1.
KappaShift select_kappa(double growth_m, double growth_beta, double T, double margin);

/// select_kappa applied to a family's certified growth constants.
KappaShift shift_for(const EvolutionFamily& fam, double margin);

/// a(t,s) by the principal-log contour integral at tolerance tol.
/// Exact (no quadrature) at t == s, where a = Log(1 + kappa) I.
LogRepresentation log_representation(const EvolutionFamily& fam, const KappaShift& shift,
                                     double t, double s, double tol);

/// 4th-order central difference of a(., s) at t with stencil {t-2h .. t+2h};
/// each node evaluated at tolerance tol/10.
CMatrix dt_log(const EvolutionFamily& fam, const KappaShift& shift,
               double t, double s, double h, double tol);

/// (I - kappa (U(t,s) + kappa I)^-1) A(t); commuting families only.
CMatrix dt_log_closed_form(const EvolutionFamily& fam, const KappaShift& shift,
                           double t, double s);

/// (I + kappa U(s,t)) * dt_log; recovers A(t) = g(t) A for commuting families.
/// Throws CommutationViolated when the family is flagged non-commuting.
CMatrix reconstruct_generator(const EvolutionFamily& fam, const KappaShift& shift,
                              double t, double s, double h, double tol);

/// Truncated power series sum of a^n / n! with N chosen so that the remainder
/// bound ||a||^(N+1) e^||a|| / (N+1)! <= tol. N is capped at 200.
SeriesExp exp_series(const CMatrix& a, double tol);

/// || exp_series(a(t,s)) - (U(t,s) + kappa I) ||.
double exp_log_roundtrip_check(const EvolutionFamily& fam, const KappaShift& shift,
                               double t, double s, double tol);

} // namespace logcalc
