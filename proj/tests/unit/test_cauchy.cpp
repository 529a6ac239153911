#include <doctest.h>

#include <cmath>

#include "logcalc/cauchy.hpp"
#include "test_helpers.hpp"

using namespace logcalc;

namespace {

CauchyProblem scalar_problem(double u0 = 1.0, double s = 0.0, double T = 1.0) {
    CauchyProblem p;
    p.spec = test::scalar_spec();
    p.initial_state = u0 * CVector::Ones(1);
    p.initial_time = s;
    p.horizon = T;
    return p;
}

Forcing constant_forcing(double c) {
    Forcing f;
    f.components = {ScalarFunction::constant(c)};
    f.holder_c = 0.0;
    f.holder_gamma = 1.0;
    return f;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1.0);
    return out;
}

} // namespace

TEST_SUITE("cauchy") {

TEST_CASE("autonomous scalar solve hits e at t = 1") {
    const CauchyProblem p = scalar_problem();
    const EvolutionFamily fam = build_family(p.spec, p.horizon);
    const Trajectory tr = solve_autonomous(p, shift_for(fam, 1.5), 1e-9, {0.0, 0.5, 1.0});
    CHECK(std::abs(tr.states[0](0) - Complex(1, 0)) < 1e-9); // series truncation at tol
    CHECK(std::abs(tr.states[2](0) - Complex(std::exp(1.0), 0)) < 1e-8);
    CHECK(tr.method == TrajectoryMethod::series);
}

TEST_CASE("autonomous rotation solve performs the quarter turn") {
    CauchyProblem p;
    p.spec = test::rotation_spec();
    p.initial_state = CVector::Zero(2);
    p.initial_state(0) = Complex(1, 0);
    p.horizon = M_PI;
    const EvolutionFamily fam = build_family(p.spec, p.horizon);
    const Trajectory tr = solve_autonomous(p, shift_for(fam, 1.5), 1e-9, {M_PI / 2.0});
    CHECK(std::abs(tr.states[0](0) - Complex(0, 0)) < 1e-8);
    CHECK(std::abs(tr.states[0](1) - Complex(-1, 0)) < 1e-8);
}

TEST_CASE("autonomous separable solve matches the closed form and the oracle") {
    CauchyProblem p;
    p.spec = test::separable_cos_spec();
    p.initial_state = CVector::Ones(2);
    p.horizon = 1.0;
    const EvolutionFamily fam = build_family(p.spec, p.horizon);
    const Trajectory tr = solve_autonomous(p, shift_for(fam, 1.5), 1e-9, {1.0});
    CHECK(std::abs(tr.states[0](0) - Complex(std::exp(std::sin(1.0)), 0)) < 1e-7);
    CHECK(std::abs(tr.states[0](1) - Complex(std::exp(2.0 * std::sin(1.0)), 0)) < 1e-7);

    const Trajectory oracle = oracle_solve(p, 1e-11, {1.0});
    CHECK((tr.states[0] - oracle.states[0]).norm() < 1e-7);
}

TEST_CASE("solutions are invariant across admissible shifts") {
    const CauchyProblem p = scalar_problem();
    const EvolutionFamily fam = build_family(p.spec, p.horizon);
    const std::vector<double> times = linspace(0.0, 1.0, 9);
    Trajectory base;
    bool first = true;
    for (const double margin : {1.2, 1.5, 3.0, 10.0}) {
        const Trajectory tr = solve_autonomous(p, shift_for(fam, margin), 1e-10, times);
        if (first) {
            base = tr;
            first = false;
        } else {
            for (std::size_t i = 0; i < times.size(); ++i) {
                CHECK((tr.states[i] - base.states[i]).norm() < 1e-8);
            }
        }
    }
}

TEST_CASE("pure integration through the Duhamel term") {
    CauchyProblem p;
    p.spec = test::zero_spec();
    p.initial_state = CVector::Zero(1);
    p.horizon = 1.0;
    p.forcing = constant_forcing(1.0);
    const EvolutionFamily fam = build_family(p.spec, p.horizon);
    const Trajectory tr = solve_nonautonomous(p, shift_for(fam, 1.5), 1e-9, {0.5, 1.0});
    CHECK(std::abs(tr.states[0](0) - Complex(0.5, 0)) < 1e-9);
    CHECK(std::abs(tr.states[1](0) - Complex(1.0, 0)) < 1e-9);
    CHECK(tr.method == TrajectoryMethod::duhamel_series);
}

TEST_CASE("inhomogeneous scalar problem: u' = u + 1 from zero") {
    CauchyProblem p = scalar_problem(0.0);
    p.forcing = constant_forcing(1.0);
    const EvolutionFamily fam = build_family(p.spec, p.horizon);
    const Trajectory tr = solve_nonautonomous(p, shift_for(fam, 1.5), 1e-9, {1.0});
    CHECK(std::abs(tr.states[0](0) - Complex(std::exp(1.0) - 1.0, 0)) < 1e-8);
}

TEST_CASE("Holder forcing sqrt|t| stays within oracle tolerance") {
    CauchyProblem p = scalar_problem(1.0);
    Forcing f;
    f.components = {ScalarFunction::sqrt_abs()};
    f.holder_c = 1.0;
    f.holder_gamma = 0.5;
    p.forcing = f;
    const EvolutionFamily fam = build_family(p.spec, p.horizon);
    const std::vector<double> times = {0.25, 0.5, 1.0};
    const Trajectory series = solve_nonautonomous(p, shift_for(fam, 1.5), 1e-7, times);
    const Trajectory oracle = oracle_solve(p, 1e-9, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK((series.states[i] - oracle.states[i]).norm() < 1e-5);
    }
}

TEST_CASE("zero forcing reduces to the autonomous path bitwise") {
    CauchyProblem p = scalar_problem();
    p.forcing = constant_forcing(0.0);
    const EvolutionFamily fam = build_family(p.spec, p.horizon);
    const KappaShift shift = shift_for(fam, 1.5);
    const std::vector<double> times = linspace(0.0, 1.0, 5);
    const Trajectory forced = solve_nonautonomous(p, shift, 1e-9, times);

    CauchyProblem q = p;
    q.forcing.reset();
    const Trajectory plain = solve_autonomous(q, shift, 1e-9, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(forced.states[i] == plain.states[i]);
    }
}

TEST_CASE("series solvers refuse non-commuting problems") {
    CauchyProblem p;
    p.spec = test::rotation_spec();
    p.initial_state = CVector::Ones(2);
    p.horizon = 1.0;
    const EvolutionFamily bad =
        make_piecewise_noncommuting(test::shear_generator(), test::rotation_generator(), 1.0);
    p.generator_override = bad.generator;
    const KappaShift shift = select_kappa(bad.growth_m, bad.growth_beta, 1.0, 1.5);
    CHECK_THROWS_AS(solve_autonomous(p, shift, 1e-8, {0.5}), CommutationViolated);
    // the oracle does not care
    const Trajectory tr = oracle_solve(p, 1e-10, {0.5});
    CHECK(tr.states[0].allFinite());
}

TEST_CASE("oracle solve on closed forms") {
    const Trajectory sc = oracle_solve(scalar_problem(), 1e-10, {1.0});
    CHECK(std::abs(sc.states[0](0) - Complex(std::exp(1.0), 0)) < 1e-9);

    CauchyProblem rot;
    rot.spec = test::rotation_spec();
    rot.initial_state = CVector::Zero(2);
    rot.initial_state(0) = Complex(1, 0);
    rot.horizon = M_PI;
    const Trajectory tr = oracle_solve(rot, 1e-10, {M_PI});
    CHECK(std::abs(tr.states[0](0) - Complex(-1, 0)) < 1e-8);
    CHECK(std::abs(tr.states[0](1) - Complex(0, 0)) < 1e-8);
}

TEST_CASE("oracle handles a stiff diagonal and backward time") {
    CauchyProblem p;
    p.spec.kind = GeneratorKind::constant;
    p.spec.a_matrix = CMatrix::Zero(2, 2);
    p.spec.a_matrix(0, 0) = Complex(-50, 0);
    p.spec.a_matrix(1, 1) = Complex(1, 0);
    p.initial_state = CVector::Ones(2);
    p.horizon = 1.0;
    const Trajectory tr = oracle_solve(p, 1e-10, {1.0});
    CHECK(std::abs(tr.states[0](0) - Complex(std::exp(-50.0), 0)) < 1e-10);
    CHECK(std::abs(tr.states[0](1) - Complex(std::exp(1.0), 0)) < 1e-8);

    const Trajectory back = oracle_solve(scalar_problem(), 1e-10, {-1.0, 1.0});
    CHECK(std::abs(back.states[0](0) - Complex(std::exp(-1.0), 0)) < 1e-9);
}

TEST_CASE("oracle reports step underflow for impossible tolerances") {
    CHECK_THROWS_AS(oracle_solve(scalar_problem(), 1e-300, {1.0}), StepUnderflow);
}

TEST_CASE("residual check on exact, corrupted, and constant trajectories") {
    const CauchyProblem p = scalar_problem();
    Trajectory exact;
    exact.times = linspace(0.0, 1.0, 101);
    for (const double t : exact.times) {
        exact.states.push_back(std::exp(t) * CVector::Ones(1));
    }
    CHECK(residual_check(exact, p) < 1e-6);

    Trajectory corrupt = exact;
    corrupt.states[50] *= 1.01;
    CHECK(residual_check(corrupt, p) > 1e-2);

    CauchyProblem zp;
    zp.spec = test::zero_spec();
    zp.initial_state = CVector::Ones(1);
    zp.horizon = 1.0;
    Trajectory flat;
    flat.times = linspace(0.0, 1.0, 11);
    flat.states.assign(11, CVector::Ones(1));
    CHECK(residual_check(flat, zp) < 1e-14);

    Trajectory coarse = exact;
    coarse.times.resize(4);
    coarse.states.resize(4);
    CHECK_THROWS_AS(residual_check(coarse, p), GridTooCoarse);

    Trajectory uneven = exact;
    uneven.times[3] += 0.002;
    CHECK_THROWS_AS(residual_check(uneven, p), GridTooCoarse);
}

TEST_CASE("Cauchy-integral evaluation of lambda^n e^lambda") {
    CHECK(operator_norm(dunford_poly_exp(CMatrix::Zero(2, 2), 0, 1e-10) -
                        CMatrix::Identity(2, 2)) < 1e-9);
    CHECK(std::abs(dunford_poly_exp(CMatrix::Ones(1, 1), 1, 1e-10)(0, 0) -
                   Complex(std::exp(1.0), 0)) < 1e-9);
    CHECK_THROWS_AS(dunford_poly_exp(CMatrix::Ones(1, 1), 4, 1e-8), std::invalid_argument);
}

TEST_CASE("functional-calculus identity a^n exp(a)") {
    const EvolutionFamily fam = build_family(test::rotation_spec(), M_PI);
    const KappaShift shift = shift_for(fam, 1.5);
    const CMatrix a = log_representation(fam, shift, 1.0, 0.0, 1e-11).a;
    const double tol = 1e-9;
    const CMatrix ea = exp_series(a, 1e-13).value;
    CMatrix pw = CMatrix::Identity(2, 2);
    for (int n = 0; n <= 3; ++n) {
        CHECK(operator_norm(dunford_poly_exp(a, n, tol) - pw * ea) <= 10.0 * tol);
        pw = (pw * a).eval();
    }
}

TEST_CASE("derivative scan is bounded for first derivatives") {
    const EvolutionFamily fam = build_family(test::scalar_spec(), 1.0);
    const KappaShift shift = shift_for(fam, 1.5);
    const auto scan = derivative_bound_scan(fam, shift, 0.0, 1, dyadic_grid(3, 10));
    REQUIRE(scan.size() == 8);
    double lo = 1e300, hi = 0.0;
    for (const auto& [t, v] : scan) {
        CHECK(v > 0.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 1e3);

    CHECK_THROWS_AS(derivative_bound_scan(fam, shift, 0.0, 3, dyadic_grid(3, 4)),
                    std::invalid_argument);
}

TEST_CASE("derivative scan vanishes for the zero generator") {
    const EvolutionFamily fam = build_family(test::zero_spec(), 1.0);
    const KappaShift shift = shift_for(fam, 1.5);
    for (const auto& [t, v] : derivative_bound_scan(fam, shift, 0.0, 1, dyadic_grid(3, 6))) {
        CHECK(v < 1e-9);
    }
}

TEST_CASE("Holder exponent estimation") {
    std::vector<double> dyadic{0.0};
    for (int k = 16; k >= 0; --k) dyadic.push_back(std::pow(2.0, -k));

    const HolderEstimate sq = holder_estimate(ScalarFunction::sqrt_abs(), dyadic);
    CHECK(sq.gamma_est > 0.45);
    CHECK(sq.gamma_est < 0.55);

    const HolderEstimate lin = holder_estimate(ScalarFunction::poly({0.0, 1.0}), dyadic);
    CHECK(lin.gamma_est == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lin.c_est == doctest::Approx(1.0).epsilon(1e-9));

    const HolderEstimate flat = holder_estimate(ScalarFunction::constant(4.0), dyadic);
    CHECK(flat.c_est == 0.0);
    CHECK(flat.gamma_est == 1.0);

    CHECK_THROWS_AS(holder_estimate(ScalarFunction::sqrt_abs(), linspace(0.0, 1.0, 16)),
                    GridTooCoarse);
}

TEST_CASE("forcing validation enforces the declared bound") {
    Forcing ok;
    ok.components = {ScalarFunction::sqrt_abs()};
    ok.holder_c = 1.0;
    ok.holder_gamma = 0.5;
    CHECK_NOTHROW(validate_forcing(ok, -1.0, 1.0));

    Forcing bad;
    bad.components = {ScalarFunction::poly({0.0, 1.0})};
    bad.holder_c = 0.5; // the line has Lipschitz constant 1
    bad.holder_gamma = 1.0;
    CHECK_THROWS_AS(validate_forcing(bad, -1.0, 1.0), SchemaViolation);
}

} // TEST_SUITE
