"""Smoke tests for the ebql extension module."""

import math

import pytest

import ebql


def test_normal_cdf():
    assert ebql.normal_cdf(0.0) == pytest.approx(0.5)
    assert ebql.normal_cdf(1.96) == pytest.approx(0.975, abs=1e-3)
    assert ebql.normal_cdf(-3.0) + ebql.normal_cdf(3.0) == pytest.approx(1.0)


def test_rng_is_deterministic():
    a = ebql.Rng(42)
    b = ebql.Rng(42)
    assert [a.uniform01() for _ in range(5)] == [b.uniform01() for _ in range(5)]
    assert a.child(3).seed == b.child(3).seed
    draws = ebql.Rng(1).gaussians(2.0, 0.5, 1000)
    assert sum(draws) / len(draws) == pytest.approx(2.0, abs=0.1)


def test_single_estimator():
    out = ebql.single_estimator([[1.0, 3.0], [10.0, -2.0]])
    assert out["chosen_index"] == 1
    assert out["estimate"] == pytest.approx(4.0)


def test_proxy_identity():
    rng = ebql.Rng(7)
    samples = [rng.gaussians(mu, 1.0, 12) for mu in (0.5, 0.0, -0.3)]
    subsets = [[0, 3, 6, 9], [1, 4, 7, 10], [2, 5, 8, 11]]
    ee = ebql.ensemble_estimator(samples, subsets, 0)
    wde = ebql.weighted_double_estimator(samples, subsets[0], subsets[1] + subsets[2])
    assert ee["chosen_index"] == wde["chosen_index"]
    assert ee["estimate"] == pytest.approx(wde["estimate"], abs=1e-12)


def test_closed_form_matches_monte_carlo():
    means, stds = [0.5, 0.0], [1.0, 1.0]
    probs = ebql.argmax_probability_2gauss(means, stds, 4)
    assert sum(probs) == pytest.approx(1.0)
    stats = ebql.wde_statistics(means, stds, 12, 4, probs)
    mc = ebql.monte_carlo_estimator_stats(means, stds, "wde", 12, param=4,
                                          trials=200000, seed=11, jobs=2)
    assert stats["bias"] == pytest.approx(mc["bias"], abs=4 * mc["bias_se"])
    assert stats["mse"] == pytest.approx(mc["mse"], abs=4 * mc["mse_se"])
    assert stats["mse"] == pytest.approx(ebql.wde_mse_2gauss(means, stds, 12, 4))


def test_optimal_split_below_half():
    curve = ebql.optimal_split([0.5, 0.0], [1.0, 1.0], 40)
    assert 1 <= curve["n1_star"] < 20
    assert len(curve["n1_grid"]) == 39


def test_true_q():
    q = ebql.true_q(-0.2)
    assert q["optimal_a_action"] == 0
    assert q["optimal_a_value"] == 0.0
    assert ebql.true_q(0.4)["optimal_a_value"] == pytest.approx(0.4)


def test_validation_errors():
    with pytest.raises(ValueError):
        ebql.single_estimator([])
    with pytest.raises(ValueError):
        ebql.ensemble_estimator([[1.0, 2.0, 3.0]], [[0, 1], [2]], 0)
    with pytest.raises(ValueError):
        ebql.Rng(0).gaussian(0.0, -1.0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
