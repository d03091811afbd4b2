import math
import os

import numpy as np
import pytest

import zosa


def test_benchmark_values():
    assert zosa.eval_function("rosenbrock", [0.0, 0.0]) == 1.0
    assert zosa.eval_function("cubic", [1.0]) == 1.5
    assert zosa.eval_function("levy", np.ones(7)) == 0.0
    np.testing.assert_array_equal(zosa.eval_gradient("quadratic", [0.5, -2.0]), [0.5, -2.0])


def test_bad_inputs_raise():
    with pytest.raises(zosa.ConfigError):
        zosa.eval_function("sphere", [1.0])
    with pytest.raises(ValueError):
        zosa.eval_function("quadratic", [1.0, math.nan])
    with pytest.raises(ValueError):
        zosa.loss_std([])


def test_loss_std_and_cosine():
    assert zosa.loss_std([1.0, 3.0]) == pytest.approx(math.sqrt(2.0))
    assert zosa.cosine_similarity([1.0, 1.0], [1.0, 0.0]) == pytest.approx(1 / math.sqrt(2))


def test_one_sided_estimate_builtin_and_callable_agree():
    theta = np.linspace(-1.0, 1.0, 6)
    a = zosa.one_sided_estimate("quadratic", theta, epsilon=1e-3, m=8, seed=4)
    b = zosa.one_sided_estimate(lambda x: 0.5 * float(np.dot(x, x)), theta, epsilon=1e-3, m=8, seed=4)
    assert a["queries"] == 9
    assert len(a["perturbed_losses"]) == 8
    np.testing.assert_allclose(a["grad"], b["grad"], rtol=1e-12, atol=1e-12)
    assert a["sigma"] == pytest.approx(b["sigma"], rel=1e-12)


def test_constant_callable_gives_zero_estimate():
    r = zosa.one_sided_estimate(lambda x: 2.0, np.zeros(4), m=5)
    np.testing.assert_array_equal(r["grad"], np.zeros(4))
    assert r["sigma"] == 0.0


def test_run_converges_and_counts_queries():
    r = zosa.run("zosa", "quadratic", 20, 300, seed=1, eta=1e-4, m=4)
    assert r["optimization_queries"] == 300 * 2 * 5
    assert r["queries_cum"][-1] == r["optimization_queries"]
    assert r["gap"][-1] < r["initial_gap"]
    again = zosa.run("zosa", "quadratic", 20, 300, seed=1, eta=1e-4, m=4)
    np.testing.assert_array_equal(r["loss"], again["loss"])


def test_run_from_given_point():
    r = zosa.run("fzoo", "quadratic", 3, 1, initial_theta=[1.0, 2.0, 3.0], m=4)
    np.testing.assert_array_equal(r["initial_theta"], [1.0, 2.0, 3.0])


def test_validate_sigma_law():
    report = zosa.validate("sigma_law", {"trials": 2000})
    assert report["pass"] is True


def test_run_experiment(tmp_path):
    config = {
        "optimizer": {"kind": "zosa", "m": 4},
        "objective": {"function": "quadratic"},
        "dimension": 10,
        "iterations": 100,
        "seeds": [0, 1],
        "output": str(tmp_path / "run"),
    }
    summary = zosa.run_experiment(config)
    assert summary["total_queries"] == 2000
    assert (tmp_path / "run" / "trace_seed1.csv").exists()
    with pytest.raises(zosa.ConfigError):
        zosa.run_experiment({**config, "bogus": 1})


@pytest.mark.skipif("ZOSA_PEER" not in os.environ, reason="peer binary not provided")
def test_external_peer_matches_builtin(tmp_path):
    base = {
        "optimizer": {"kind": "zosa", "m": 4},
        "dimension": 5,
        "iterations": 20,
        "seeds": [3],
    }
    a = zosa.run_experiment({**base, "objective": {"function": "quadratic"}, "output": str(tmp_path / "a")})
    b = zosa.run_experiment(
        {
            **base,
            "objective": {"external": {"command": [os.environ["ZOSA_PEER"]]}, "optimum": 0.0},
            "output": str(tmp_path / "b"),
        }
    )
    assert a["runs"][0]["final_gap"] == b["runs"][0]["final_gap"]
