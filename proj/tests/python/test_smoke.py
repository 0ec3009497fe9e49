import math

import numpy as np
import pytest

import modshoot


def test_benchmarks_listed():
    names = modshoot.benchmark_names()
    for name in ("block", "quadrotor1d", "cartpole", "acrobot", "quadrotor2d"):
        assert name in names


def test_accel_block_and_hover():
    assert modshoot.accel("block", [0.0], [0.0], [2.0])[0] == 2.0
    assert modshoot.accel("quadrotor1d", [0.3], [0.0], [9.81])[0] == 0.0


def test_unknown_benchmark_raises():
    with pytest.raises(ValueError):
        modshoot.accel("biped", [0.0], [0.0], [0.0])


def test_second_euler_rollout_is_exact_on_double_integrator():
    controls = np.array([[1.0], [-2.0], [0.5]])
    h = 0.25
    t = modshoot.rollout("block", "2nd-euler", np.zeros(2), controls, h)
    q, v = 0.0, 0.0
    for u in controls[:, 0]:
        q, v = q + h * v + 0.5 * h * h * u, v + h * u
    assert t["q"][-1, 0] == pytest.approx(q, rel=1e-12)
    assert t["qdot"][-1, 0] == pytest.approx(v, rel=1e-12)
    assert list(t["times"]) == [0.0, 0.25, 0.5, 0.75]


def test_block_compare_run():
    config = {
        "problem": "block",
        "tf": 1.0,
        "N": 20,
        "schemes": ["1st-euler", "2nd-euler"],
        "cost": {"Q": [0, 0], "R": [1], "Qf": [0, 0]},
        "initial_state": [0, 0],
        "terminal_state": [1, 0],
        "terminal_fixed": True,
    }
    result = modshoot.run(config, "compare", ref_multiplier=4)
    rows = result["rows"]
    assert [r["scheme"] for r in rows] == ["1st-euler", "2nd-euler"]
    assert all(r["status"] == "Optimal" for r in rows)
    assert rows[1]["eta_total"] < rows[0]["eta_total"]
    assert result["reference_N"] == 80


def test_bad_config_raises():
    with pytest.raises(modshoot.ConfigError):
        modshoot.run({"problem": "block", "tf": 1.0, "N": 10, "schemes": []})


def test_convergence_and_bounds():
    r = modshoot.convergence_study("damped", "2nd-rk4")
    assert r["slope"] >= 3.8
    assert modshoot.euler_bound(1.0, 1.0, 1.0, 0.1) == pytest.approx(0.0027274, abs=1e-6)
    assert modshoot.rk4_bound(1.0, 0.0, 1.0, 0.1) == 0.0


def test_romberg():
    assert abs(modshoot.romberg(math.sin, 0.0, math.pi) - 2.0) < 1e-10
    assert modshoot.CSV_HEADER.startswith("problem,scheme,N,h,eta_total")
