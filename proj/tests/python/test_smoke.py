"""Smoke tests for the python bindings."""

import json
import math
import os
import pathlib

import numpy as np
import pytest

import logcalc as lc


def scenario_dir() -> pathlib.Path:
    env = os.environ.get("LOGCALC_SCENARIO_DIR")
    if env:
        return pathlib.Path(env)
    return pathlib.Path(__file__).resolve().parents[2] / "scenarios"


def rotation_generator() -> np.ndarray:
    return np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)


def test_version():
    assert lc.__version__


def test_matrix_exp_log_roundtrip():
    rng = np.random.default_rng(5)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    m += (lc.operator_norm(m) + 1.0) * np.eye(3)
    back = lc.matrix_exp(lc.matrix_log(m))
    assert np.linalg.norm(back - m, 2) < 1e-9 * np.linalg.norm(m, 2)


def test_dunford_log_matches_dense_kernel():
    m = rotation_generator() + 3.0 * np.eye(2)
    contour = lc.build_contour(3.0 + 0.0j, 1.5)
    result = lc.dunford_apply("principal-log", m, contour, 1e-10)
    assert result.node_count_used <= 512
    assert np.linalg.norm(result.value - lc.matrix_log(m), 2) < 1e-9


def test_family_evaluation_and_growth():
    fam = lc.build_family(lc.constant_generator(rotation_generator()), math.pi)
    u = fam.evaluate(math.pi / 2.0, 0.0)
    assert np.allclose(u, np.array([[0.0, 1.0], [-1.0, 0.0]]), atol=1e-12)
    m, beta = lc.estimate_growth(fam)
    assert m == pytest.approx(1.0)
    assert beta == 0.0
    assert lc.check_semigroup(fam)["pass"]


def test_generator_reconstruction():
    fam = lc.build_family(lc.constant_generator(rotation_generator()), math.pi)
    shift = lc.shift_for(fam, 1.5)
    a = lc.reconstruct_generator(fam, shift, 0.7, 0.1, 1e-3 * math.pi, 1e-9)
    assert np.linalg.norm(a - rotation_generator(), 2) < 1e-6


def test_scalar_solve_reaches_e():
    spec = lc.constant_generator(np.array([[1.0 + 0.0j]]))
    problem = lc.cauchy_problem(spec, np.array([1.0 + 0.0j]), 0.0, 1.0)
    fam = lc.build_family(spec, 1.0)
    tr = lc.solve_autonomous(problem, lc.shift_for(fam, 1.5), 1e-9, [0.0, 1.0])
    assert tr.states[1, 0] == pytest.approx(math.e, abs=1e-8)
    oracle = lc.oracle_solve(problem, 1e-10, [1.0])
    assert abs(tr.states[1, 0] - oracle.states[0, 0]) < 1e-7


def test_forced_solve():
    spec = lc.constant_generator(np.array([[1.0 + 0.0j]]))
    f = lc.forcing([("const", [1.0])], 0.0, 1.0)
    problem = lc.cauchy_problem(spec, np.array([0.0 + 0.0j]), 0.0, 1.0, f)
    fam = lc.build_family(spec, 1.0)
    tr = lc.solve_nonautonomous(problem, lc.shift_for(fam, 1.5), 1e-9, [1.0])
    assert tr.states[0, 0] == pytest.approx(math.e - 1.0, abs=1e-8)


def test_holder_estimate():
    grid = [0.0] + [2.0**-k for k in range(16, -1, -1)]
    c_est, gamma_est = lc.holder_estimate("sqrt_abs", [], grid)
    assert 0.45 < gamma_est < 0.55
    assert c_est > 0.0


def test_branch_cut_raises():
    with pytest.raises(lc.LogcalcError):
        lc.matrix_log(np.array([[-1.0 + 0.0j]]))


def test_scenario_run(tmp_path):
    ok, report_json = lc.run_scenario("validate", scenario_dir() / "scalar.json", tmp_path)
    assert ok
    assert (tmp_path / "report.json").exists()
    report = json.loads(report_json)
    assert report["pass"] is True
    assert report["checks"]
