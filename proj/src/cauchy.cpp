#include "logcalc/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace logcalc {

namespace {

constexpr int kMaxPanels = 1 << 14;

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975363};
constexpr double kGlWeight[4] = {0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

template <typename F>
CVector gl8(const F& integrand, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    CVector acc = kGlWeight[0] * (integrand(mid - half * kGlNode[0]) +
                                  integrand(mid + half * kGlNode[0]));
    for (int i = 1; i < 4; ++i) {
        acc += kGlWeight[i] * (integrand(mid - half * kGlNode[i]) +
                               integrand(mid + half * kGlNode[i]));
    }
    return half * acc;
}

template <typename F>
CVector adaptive_gl8(const F& integrand, double a, double b, const CVector& whole,
                     double budget, int& panels) {
    const double mid = 0.5 * (a + b);
    const CVector left = gl8(integrand, a, mid);
    const CVector right = gl8(integrand, mid, b);
    const CVector refined = left + right;
    if ((whole - refined).norm() <= budget) return refined;
    if (++panels > kMaxPanels) {
        throw QuadratureStall("Duhamel quadrature exceeded 2^14 panels; forcing too rough for tol");
    }
    return adaptive_gl8(integrand, a, mid, left, budget / 2.0, panels) +
           adaptive_gl8(integrand, mid, b, right, budget / 2.0, panels);
}

void require_in_horizon(double t, double T, const char* what) {
    if (!(t >= -T && t <= T)) {
        throw OutOfHorizon(std::string(what) + ": time " + std::to_string(t) +
                           " outside [-T, T] with T = " + std::to_string(T));
    }
}

void validate_problem(const CauchyProblem& p, const char* what) {
    require_square_finite(p.spec.a_matrix, what);
    if (p.initial_state.size() != p.spec.dim()) {
        throw std::invalid_argument(std::string(what) + ": initial state dimension mismatch");
    }
    if (!(p.horizon > 0.0)) {
        throw std::invalid_argument(std::string(what) + ": horizon must be positive");
    }
    require_in_horizon(p.initial_time, p.horizon, what);
    if (p.forcing &&
        p.forcing->components.size() != static_cast<std::size_t>(p.spec.dim())) {
        throw std::invalid_argument(std::string(what) + ": forcing component count mismatch");
    }
}

void validate_output_times(const std::vector<double>& times, double T, const char* what) {
    if (times.empty()) throw std::invalid_argument(std::string(what) + ": no output times");
    for (std::size_t i = 0; i < times.size(); ++i) {
        require_in_horizon(times[i], T, what);
        if (i > 0 && times[i] < times[i - 1]) {
            throw std::invalid_argument(std::string(what) + ": output times must be ascending");
        }
    }
}

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
    static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double a2[1] = {1.0 / 5};
    static constexpr double a3[2] = {3.0 / 40, 9.0 / 40};
    static constexpr double a4[3] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
    static constexpr double a5[4] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561,
                                     -212.0 / 729};
    static constexpr double a6[5] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                                     -5103.0 / 18656};
    static constexpr double b[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784, 11.0 / 84, 0.0};
    // b - b_embedded; dotting the stages with this gives the error estimate
    static constexpr double e[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                    -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
};

template <typename Rhs>
class AdaptiveRk {
public:
    AdaptiveRk(Rhs rhs, double tol) : rhs_(std::move(rhs)), tol_(tol) {}

    /// Advances (t, y) to exactly t_target.
    void advance(double& t, CVector& y, double t_target) {
        const double dir = t_target >= t ? 1.0 : -1.0;
        if (t == t_target) return;
        if (std::abs(h_) == 0.0 || dir * h_ <= 0.0) {
            h_ = dir * std::min(0.05, std::abs(t_target - t));
            k1_ = rhs_(t, y);
        }
        while (dir * (t_target - t) > 0.0) {
            double h = h_;
            if (dir * (t + h - t_target) > 0.0) h = t_target - t;
            if (std::abs(h) < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
                throw StepUnderflow("adaptive RK step underflow at t = " + std::to_string(t));
            }
            step(t, y, h);
        }
    }

private:
    void step(double& t, CVector& y, double h) {
        using Dp = DormandPrince;
        const CVector k2 = rhs_(t + Dp::c[1] * h, y + h * (Dp::a2[0] * k1_));
        const CVector k3 = rhs_(t + Dp::c[2] * h, y + h * (Dp::a3[0] * k1_ + Dp::a3[1] * k2));
        const CVector k4 =
            rhs_(t + Dp::c[3] * h, y + h * (Dp::a4[0] * k1_ + Dp::a4[1] * k2 + Dp::a4[2] * k3));
        const CVector k5 = rhs_(t + Dp::c[4] * h, y + h * (Dp::a5[0] * k1_ + Dp::a5[1] * k2 +
                                                           Dp::a5[2] * k3 + Dp::a5[3] * k4));
        const CVector k6 =
            rhs_(t + Dp::c[5] * h, y + h * (Dp::a6[0] * k1_ + Dp::a6[1] * k2 + Dp::a6[2] * k3 +
                                            Dp::a6[3] * k4 + Dp::a6[4] * k5));
        const CVector y5 = y + h * (Dp::b[0] * k1_ + Dp::b[2] * k3 + Dp::b[3] * k4 +
                                    Dp::b[4] * k5 + Dp::b[5] * k6);
        const CVector k7 = rhs_(t + h, y5);
        const CVector err_vec = h * (Dp::e[0] * k1_ + Dp::e[2] * k3 + Dp::e[3] * k4 +
                                     Dp::e[4] * k5 + Dp::e[5] * k6 + Dp::e[6] * k7);

        double err = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double scale = tol_ + tol_ * std::max(std::abs(y(i)), std::abs(y5(i)));
            const double r = std::abs(err_vec(i)) / scale;
            err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(y.size()));

        if (err <= 1.0) {
            t += h;
            y = y5;
            k1_ = k7; // first-same-as-last
        }
        const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        h_ = h * factor;
    }

    Rhs rhs_;
    double tol_;
    double h_ = 0.0;
    CVector k1_;
};

} // namespace

CVector Forcing::operator()(double t) const {
    CVector v(static_cast<Eigen::Index>(components.size()));
    for (std::size_t i = 0; i < components.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = Complex(components[i](t), 0.0);
    }
    return v;
}

bool Forcing::is_zero() const {
    for (const auto& c : components) {
        if (c.name != ScalarFunction::Name::constant || c.params.at(0) != 0.0) return false;
    }
    return true;
}

void validate_forcing(const Forcing& f, double t_lo, double t_hi, int grid_points) {
    if (f.components.empty()) throw SchemaViolation("forcing: needs at least one component");
    if (!(f.holder_gamma > 0.0) || f.holder_gamma > 1.0) {
        throw SchemaViolation("forcing: holder_gamma must lie in (0, 1]");
    }
    if (f.holder_c < 0.0) throw SchemaViolation("forcing: holder_C must be nonnegative");
    if (grid_points < 2 || !(t_hi > t_lo)) {
        throw std::invalid_argument("validate_forcing: bad validation grid");
    }
    constexpr double kSlack = 0.05;
    for (int i = 0; i < grid_points; ++i) {
        const double ti = t_lo + (t_hi - t_lo) * i / (grid_points - 1);
        for (int j = i + 1; j < grid_points; ++j) {
            const double tj = t_lo + (t_hi - t_lo) * j / (grid_points - 1);
            const double quotient =
                (f(tj) - f(ti)).norm() / std::pow(std::abs(tj - ti), f.holder_gamma);
            if (quotient > f.holder_c * (1.0 + kSlack)) {
                throw SchemaViolation("forcing: sampled Holder quotient " +
                                      std::to_string(quotient) + " exceeds declared bound");
            }
        }
    }
}

CMatrix CauchyProblem::generator_at(double t) const {
    if (generator_override) return generator_override(t);
    return spec.a_of(t);
}

std::string to_string(TrajectoryMethod m) {
    switch (m) {
        case TrajectoryMethod::series: return "series";
        case TrajectoryMethod::duhamel_series: return "duhamel-series";
        case TrajectoryMethod::oracle_rk: return "oracle-rk";
    }
    throw std::logic_error("unreachable trajectory method");
}

Trajectory solve_autonomous(const CauchyProblem& p, const KappaShift& shift,
                            double tol, const std::vector<double>& output_times) {
    validate_problem(p, "solve_autonomous");
    validate_output_times(output_times, p.horizon, "solve_autonomous");
    if (p.forcing && !p.forcing->is_zero()) {
        throw std::invalid_argument("solve_autonomous: forcing present; use solve_nonautonomous");
    }
    if (!p.commuting()) {
        throw CommutationViolated("series solution requires a commuting-class generator");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("solve_autonomous: tol must be positive");

    const EvolutionFamily fam = build_family(p.spec, p.horizon);
    Trajectory tr;
    tr.method = TrajectoryMethod::series;
    tr.tol_achieved = tol;
    tr.times = output_times;
    tr.states.reserve(output_times.size());
    for (const double t : output_times) {
        const LogRepresentation rep = log_representation(fam, shift, t, p.initial_time, tol / 10.0);
        const SeriesExp se = exp_series(rep.a, tol / 10.0);
        tr.states.push_back(se.value * p.initial_state - shift.kappa * p.initial_state);
    }
    return tr;
}

Trajectory solve_nonautonomous(const CauchyProblem& p, const KappaShift& shift,
                               double tol, const std::vector<double>& output_times) {
    validate_problem(p, "solve_nonautonomous");
    validate_output_times(output_times, p.horizon, "solve_nonautonomous");
    if (!p.forcing) {
        throw std::invalid_argument("solve_nonautonomous: forcing required");
    }
    if (!p.commuting()) {
        throw CommutationViolated("series solution requires a commuting-class generator");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("solve_nonautonomous: tol must be positive");
    validate_forcing(*p.forcing, -p.horizon, p.horizon);

    const EvolutionFamily fam = build_family(p.spec, p.horizon);
    const Forcing& f = *p.forcing;
    const double s = p.initial_time;
    const Eigen::Index n = p.spec.dim();

    Trajectory tr;
    tr.method = TrajectoryMethod::duhamel_series;
    tr.tol_achieved = tol;
    tr.times = output_times;
    tr.states.reserve(output_times.size());
    for (const double t : output_times) {
        const LogRepresentation rep = log_representation(fam, shift, t, s, tol / 10.0);
        const SeriesExp se = exp_series(rep.a, tol / 10.0);
        CVector u = se.value * p.initial_state - shift.kappa * p.initial_state;

        if (t != s && !f.is_zero()) {
            const auto integrand = [&](double tau) -> CVector {
                const LogRepresentation rtau =
                    log_representation(fam, shift, t, tau, tol / 10.0);
                const SeriesExp stau = exp_series(rtau.a, tol / 10.0);
                const CVector ftau = f(tau);
                return stau.value * ftau - shift.kappa * ftau;
            };
            const double lo = std::min(s, t);
            const double hi = std::max(s, t);
            int panels = 1;
            const CVector whole = gl8(integrand, lo, hi);
            CVector integral = adaptive_gl8(integrand, lo, hi, whole, tol, panels);
            if (t < s) integral = -integral;
            u += integral;
        } else if (t != s) {
            u += CVector::Zero(n); // zero forcing contributes exactly nothing
        }
        tr.states.push_back(std::move(u));
    }
    return tr;
}

Trajectory oracle_solve(const CauchyProblem& p, double tol,
                        const std::vector<double>& output_times) {
    validate_problem(p, "oracle_solve");
    validate_output_times(output_times, p.horizon, "oracle_solve");
    if (!(tol > 0.0)) throw std::invalid_argument("oracle_solve: tol must be positive");

    const auto rhs = [&p](double t, const CVector& y) -> CVector {
        CVector v = p.generator_at(t) * y;
        if (p.forcing) v += (*p.forcing)(t);
        return v;
    };

    Trajectory tr;
    tr.method = TrajectoryMethod::oracle_rk;
    tr.tol_achieved = tol;
    tr.times = output_times;
    tr.states.resize(output_times.size());

    // Forward targets in ascending order, backward targets in descending order,
    // each swept by its own integration from the initial data.
    std::vector<std::size_t> forward, backward;
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        (output_times[i] >= p.initial_time ? forward : backward).push_back(i);
    }
    std::sort(backward.rbegin(), backward.rend());

    for (const auto& targets : {forward, backward}) {
        double t = p.initial_time;
        CVector y = p.initial_state;
        AdaptiveRk rk(rhs, tol);
        for (const std::size_t idx : targets) {
            rk.advance(t, y, output_times[idx]);
            tr.states[idx] = y;
        }
    }
    return tr;
}

double residual_check(const Trajectory& tr, const CauchyProblem& p) {
    const std::size_t n = tr.times.size();
    if (n < 5) throw GridTooCoarse("residual_check: need at least 5 uniformly spaced times");
    const double h = tr.times[1] - tr.times[0];
    if (!(h > 0.0)) throw GridTooCoarse("residual_check: times must be strictly increasing");
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(tr.times[i] - tr.times[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw GridTooCoarse("residual_check: times must be uniformly spaced");
        }
    }
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const CVector deriv = (tr.states[i - 2] - 8.0 * tr.states[i - 1] +
                               8.0 * tr.states[i + 1] - tr.states[i + 2]) /
                              (12.0 * h);
        CVector rhs = p.generator_at(tr.times[i]) * tr.states[i];
        if (p.forcing) rhs += (*p.forcing)(tr.times[i]);
        worst = std::max(worst, (deriv - rhs).norm());
    }
    return worst;
}

CMatrix dunford_poly_exp(const CMatrix& a, int n, double tol) {
    if (n < 0 || n > 3) throw std::invalid_argument("dunford_poly_exp: n must be in 0..3");
    require_square_finite(a, "dunford_poly_exp");
    const double bound = spectral_radius_upper(a).radius_upper;
    // f = lambda^n e^lambda is entire, so the path only needs to enclose the
    // spectrum; a modest radius keeps e^lambda from swamping the quadrature.
    const Contour c{Complex(0.0, 0.0), bound + 2.0, 16};
    return dunford_apply(DunfordFunction::poly_times_exp(n), a, c, tol).value;
}

std::vector<double> dyadic_grid(int k_lo, int k_hi) {
    if (k_lo > k_hi) std::swap(k_lo, k_hi);
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
    for (int k = k_lo; k <= k_hi; ++k) g.push_back(std::pow(2.0, -k));
    return g;
}

std::vector<std::pair<double, double>>
derivative_bound_scan(const EvolutionFamily& fam, const KappaShift& shift,
                      double s, int n, const std::vector<double>& t_grid) {
    if (n != 1 && n != 2) throw std::invalid_argument("derivative_bound_scan: n must be 1 or 2");
    if (t_grid.empty()) throw std::invalid_argument("derivative_bound_scan: empty grid");
    constexpr double kQuadTol = 1e-12;

    const auto exp_at = [&](double t) {
        const LogRepresentation rep = log_representation(fam, shift, t, s, kQuadTol);
        return exp_series(rep.a, kQuadTol).value;
    };

    std::vector<std::pair<double, double>> scan;
    scan.reserve(t_grid.size());
    for (const double t : t_grid) {
        if (!(t > 0.0) || t > fam.horizon) {
            throw OutOfHorizon("derivative_bound_scan: grid must lie in (0, T]");
        }
        const double h = std::min({1e-3 * fam.horizon, t / 4.0, (fam.horizon - t) / 2.0});
        if (!(h > 1e3 * std::numeric_limits<double>::epsilon())) {
            throw StepTooSmall("derivative_bound_scan: no usable step at t = " + std::to_string(t));
        }
        const CMatrix e_m2 = exp_at(t - 2.0 * h);
        const CMatrix e_m1 = exp_at(t - h);
        const CMatrix e_p1 = exp_at(t + h);
        const CMatrix e_p2 = exp_at(t + 2.0 * h);
        CMatrix deriv;
        if (n == 1) {
            deriv = (e_m2 - 8.0 * e_m1 + 8.0 * e_p1 - e_p2) / (12.0 * h);
        } else {
            const CMatrix e_0 = exp_at(t);
            deriv = (-e_m2 + 16.0 * e_m1 - 30.0 * e_0 + 16.0 * e_p1 - e_p2) / (12.0 * h * h);
        }
        scan.emplace_back(t, std::pow(t, n) * operator_norm(deriv));
    }
    return scan;
}

HolderEstimate holder_estimate(const Forcing& f, const std::vector<double>& grid) {
    if (grid.size() < 17) throw GridTooCoarse("holder_estimate: need at least 17 grid points");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t pairs = 0;
    bool any_distinct = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            const double d = std::abs(grid[j] - grid[i]);
            if (d == 0.0) continue;
            any_distinct = true;
            const double fv = (f(grid[j]) - f(grid[i])).norm();
            if (fv == 0.0) continue;
            const double x = std::log(d);
            const double y = std::log(fv);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++pairs;
        }
    }
    if (!any_distinct) throw DegenerateData("holder_estimate: grid has no distinct points");
    if (pairs == 0) return {0.0, 1.0}; // constant forcing

    const double denom = pairs * sxx - sx * sx;
    if (denom == 0.0) throw DegenerateData("holder_estimate: degenerate pair distances");
    const double slope = (pairs * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / pairs;
    HolderEstimate est;
    est.gamma_est = std::clamp(slope, 1e-12, 1.0);
    est.c_est = std::exp(intercept);
    return est;
}

HolderEstimate holder_estimate(const ScalarFunction& f, const std::vector<double>& grid) {
    Forcing wrap;
    wrap.components = {f};
    wrap.holder_c = 0.0;
    wrap.holder_gamma = 1.0;
    return holder_estimate(wrap, grid);
}

} // namespace logcalc
