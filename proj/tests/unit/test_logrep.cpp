#include <doctest.h>

#include <cmath>

#include "logcalc/logrep.hpp"
#include "test_helpers.hpp"

using namespace logcalc;

TEST_SUITE("logrep") {

TEST_CASE("shift selection") {
    const KappaShift a = select_kappa(1.0, 0.0, 1.0, 1.5);
    CHECK(a.kappa == Complex(1.5, 0));
    CHECK(a.growth_bound == 1.0);

    const KappaShift b = select_kappa(1.0, 1.0, 1.0, 1.5);
    CHECK(b.kappa.real() == doctest::Approx(1.5 * std::exp(1.0)).epsilon(1e-15));
    CHECK(b.kappa.imag() == 0.0);

    CHECK_THROWS_AS(select_kappa(1.0, 0.0, 1.0, 1.0), BadMargin);
    CHECK(select_kappa(1.0, 0.0, 1.0, 1.5).kappa.real() > select_kappa(1.0, 0.0, 1.0, 1.2).kappa.real());
}

TEST_CASE("log representation is exact at coincident times") {
    const EvolutionFamily fam = build_family(test::rotation_spec(), 1.0);
    const KappaShift shift{Complex(3, 0), 1.0, 3.0};
    const LogRepresentation rep = log_representation(fam, shift, 0.4, 0.4, 1e-10);
    CHECK(rep.node_count_used == 0);
    CHECK(operator_norm(rep.a - std::log(4.0) * CMatrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("scalar log representation has the closed form ln(e + kappa)") {
    const EvolutionFamily fam = build_family(test::scalar_spec(), 1.0);
    const KappaShift shift{Complex(3, 0), std::exp(1.0), 3.0 / std::exp(1.0)};
    const LogRepresentation rep = log_representation(fam, shift, 1.0, 0.0, 1e-10);
    CHECK(std::abs(rep.a(0, 0) - Complex(std::log(std::exp(1.0) + 3.0), 0)) < 1e-9);
    CHECK(operator_norm(rep.a) <= rep.norm_bound);
}

TEST_CASE("rotation log representation matches the dense kernel") {
    const EvolutionFamily fam = build_family(test::rotation_spec(), M_PI);
    const KappaShift shift{Complex(3, 0), 1.0, 3.0};
    const double tol = 1e-10;
    const LogRepresentation rep = log_representation(fam, shift, 1.0, 0.0, tol);
    CMatrix shifted = evaluate(fam, 1.0, 0.0);
    shifted.diagonal().array() += shift.kappa;
    CHECK(operator_norm(rep.a - matrix_log(shifted)) <= 10.0 * tol);
    CHECK(operator_norm(rep.a) <= rep.norm_bound);
}

TEST_CASE("time derivative of the logarithm, scalar closed form") {
    const EvolutionFamily fam = build_family(test::scalar_spec(), 1.0);
    const KappaShift shift{Complex(3, 0), std::exp(1.0), 3.0 / std::exp(1.0)};
    const double expected = std::exp(1.0) / (std::exp(1.0) + 3.0); // d/dt ln(e^t + 3) at t = 1

    // horizon excludes t + 2h beyond T, so differentiate just inside
    const CMatrix d = dt_log(fam, shift, 1.0 - 5e-3, 0.0, 1e-3, 1e-9);
    const double drift = std::abs(d(0, 0).real() -
                                  std::exp(1.0 - 5e-3) / (std::exp(1.0 - 5e-3) + 3.0));
    CHECK(drift < 1e-7);
    CHECK(std::abs(expected - 0.4753668864186717) < 1e-12); // frozen reference value

    CHECK_THROWS_AS(dt_log(fam, shift, 0.5, 0.0, 1e-14, 1e-9), StepTooSmall);
    CHECK_THROWS_AS(dt_log(fam, shift, 1.0, 0.0, 1e-3, 1e-9), OutOfHorizon);
}

TEST_CASE("closed-form derivative identities") {
    const EvolutionFamily fam = build_family(test::scalar_spec(), 1.0);
    const KappaShift shift{Complex(3, 0), std::exp(1.0), 3.0 / std::exp(1.0)};
    const CMatrix d = dt_log_closed_form(fam, shift, 1.0, 0.0);
    CHECK(std::abs(d(0, 0) - Complex(std::exp(1.0) / (std::exp(1.0) + 3.0), 0)) < 1e-14);

    // at t = s the factor collapses to A / (1 + kappa)
    const EvolutionFamily rot = build_family(test::rotation_spec(), 1.0);
    const KappaShift shift3{Complex(3, 0), 1.0, 3.0};
    const CMatrix ds = dt_log_closed_form(rot, shift3, 0.2, 0.2);
    CHECK(operator_norm(ds - 0.25 * test::rotation_generator()) < 1e-14);

    const EvolutionFamily zero = build_family(test::zero_spec(), 1.0);
    const KappaShift shiftz{Complex(1.5, 0), 1.0, 1.5};
    CHECK(operator_norm(dt_log_closed_form(zero, shiftz, 0.7, -0.1)) == 0.0);
}

TEST_CASE("finite differences match the closed form") {
    const EvolutionFamily fam = build_family(test::rotation_spec(), M_PI);
    const KappaShift shift = shift_for(fam, 1.5);
    for (const auto& [t, s] : {std::pair{0.9, 0.1}, {-0.6, 0.8}, {1.7, -2.0}}) {
        const CMatrix fd = dt_log(fam, shift, t, s, 1e-3 * M_PI, 1e-9);
        const CMatrix cf = dt_log_closed_form(fam, shift, t, s);
        CHECK(operator_norm(fd - cf) < 1e-6);
    }
}

TEST_CASE("generator reconstruction over shifts and families") {
    // scalar: (1 + kappa e^(s-t)) d/dt ln(e^(t-s) + kappa) = 1 identically
    const EvolutionFamily sc = build_family(test::scalar_spec(), 1.0);
    for (const double margin : {1.2, 1.5, 3.0, 10.0}) {
        const KappaShift shift = shift_for(sc, margin);
        const CMatrix a = reconstruct_generator(sc, shift, 0.5, -0.25, 1e-3, 1e-9);
        CHECK(std::abs(a(0, 0) - Complex(1, 0)) < 1e-6);
    }

    const EvolutionFamily rot = build_family(test::rotation_spec(), M_PI);
    const KappaShift shift3{Complex(3, 0), 1.0, 3.0};
    const CMatrix arec = reconstruct_generator(rot, shift3, 0.7, 0.1, 1e-3 * M_PI, 1e-9);
    CHECK(operator_norm(arec - test::rotation_generator()) < 1e-6);

    const EvolutionFamily sep = build_family(test::separable_cos_spec(), 1.0);
    const KappaShift shifts = shift_for(sep, 1.5);
    const CMatrix asep = reconstruct_generator(sep, shifts, 0.5, 0.0, 1e-3, 1e-9);
    CHECK(operator_norm(asep - std::cos(0.5) * sep.spec.a_matrix) < 1e-6);
}

TEST_CASE("reconstruction is kappa-invariant") {
    const EvolutionFamily fam = build_family(test::rotation_spec(), M_PI);
    CMatrix first;
    for (const double margin : {1.2, 1.5, 3.0, 10.0}) {
        const CMatrix a =
            reconstruct_generator(fam, shift_for(fam, margin), 1.2, -0.9, 1e-3 * M_PI, 1e-9);
        if (first.size() == 0) {
            first = a;
        } else {
            CHECK(operator_norm(a - first) < 1e-6);
        }
    }
}

TEST_CASE("reconstruction refuses non-commuting families") {
    const EvolutionFamily bad =
        make_piecewise_noncommuting(test::shear_generator(), test::rotation_generator(), 1.0);
    const KappaShift shift = select_kappa(bad.growth_m, bad.growth_beta, bad.horizon, 1.5);
    CHECK_THROWS_AS(reconstruct_generator(bad, shift, 0.5, -0.5, 1e-3, 1e-8),
                    CommutationViolated);
    CHECK_THROWS_AS(dt_log_closed_form(bad, shift, 0.5, -0.5), CommutationViolated);
}

TEST_CASE("series exponential") {
    const SeriesExp zero = exp_series(CMatrix::Zero(2, 2), 1e-12);
    CHECK(zero.terms == 0);
    CHECK(operator_norm(zero.value - CMatrix::Identity(2, 2)) == 0.0);

    const SeriesExp one = exp_series(CMatrix::Ones(1, 1), 1e-12);
    CHECK(std::abs(one.value(0, 0) - Complex(std::exp(1.0), 0)) < 1e-12);

    CHECK_THROWS_AS(exp_series(150.0 * CMatrix::Identity(1, 1), 1e-12), NoConvergence);
}

TEST_CASE("series exponential closes the Dunford round trip") {
    const EvolutionFamily fam = build_family(test::rotation_spec(), M_PI);
    const KappaShift shift{Complex(3, 0), 1.0, 3.0};
    const double tol = 1e-10;
    const LogRepresentation rep = log_representation(fam, shift, 1.0, 0.0, tol);
    const SeriesExp se = exp_series(rep.a, tol);
    CMatrix shifted = evaluate(fam, 1.0, 0.0);
    shifted.diagonal().array() += shift.kappa;
    CHECK(operator_norm(se.value - shifted) <= 10.0 * tol);
}

TEST_CASE("round-trip residuals across the families") {
    const EvolutionFamily sc = build_family(test::scalar_spec(), 1.0);
    const KappaShift shift_sc = shift_for(sc, 1.5);
    CHECK(exp_log_roundtrip_check(sc, shift_sc, 0.4, 0.4, 1e-10) <= 1e-12);
    CHECK(exp_log_roundtrip_check(sc, shift_sc, 1.0, 0.0, 1e-8) <= 1e-9);

    const EvolutionFamily rot = build_family(test::rotation_spec(), M_PI);
    CHECK(exp_log_roundtrip_check(rot, shift_for(rot, 1.5), 1.0, 0.0, 1e-8) <= 1e-9);
}

TEST_CASE("similarity-transform identity in the commuting form") {
    // d/dt a * (U + kappa I) = U * A(t)
    const EvolutionFamily fam = build_family(test::separable_cos_spec(), 1.0);
    const KappaShift shift = shift_for(fam, 1.5);
    const double t = 0.6, s = -0.3;
    const CMatrix d = dt_log(fam, shift, t, s, 1e-3, 1e-9);
    CMatrix shifted = evaluate(fam, t, s);
    shifted.diagonal().array() += shift.kappa;
    CHECK(operator_norm(d * shifted - evaluate(fam, t, s) * fam.generator(t)) < 1e-6);
}

TEST_CASE("exponentials of the logarithm do not form a semigroup") {
    const EvolutionFamily fam = build_family(test::scalar_spec(), 1.0);
    const KappaShift shift = shift_for(fam, 1.5);
    const auto ea = [&](double x, double y) {
        return exp_series(log_representation(fam, shift, x, y, 1e-11).a, 1e-12).value;
    };
    const double gap = operator_norm(ea(0.9, 0.4) * ea(0.4, -0.5) - ea(0.9, -0.5));
    CHECK(gap > 0.01);
}

TEST_CASE("every constructed shift strictly clears its growth bound") {
    for (const double margin : {1.0 + 1e-9, 1.2, 1.5, 3.0, 10.0}) {
        const KappaShift s = select_kappa(2.0, 0.5, 1.5, margin);
        CHECK(std::abs(s.kappa) > s.growth_bound);
    }
}

} // TEST_SUITE
