"""Smoke tests for the python bindings."""

import math

import pytest

import pmcmc


def test_rng_reproducibility():
    a = pmcmc.RngStream(123, 0)
    b = pmcmc.RngStream(123, 0)
    assert [a.uniform() for _ in range(10)] == [b.uniform() for _ in range(10)]


def test_stable_gaussian_case_variance():
    x = pmcmc.sample_stable(seed=1, n=200000, alpha=2.0, beta=0.0)
    m = sum(x) / len(x)
    var = sum((v - m) ** 2 for v in x) / (len(x) - 1)
    assert abs(var - 2.0) < 0.05


def test_simulate_shapes_and_determinism():
    xs1, ys1 = pmcmc.simulate("lgss", seed=7, T=100, theta=[0.2, 0.8, 1.0])
    xs2, ys2 = pmcmc.simulate("lgss", seed=7, T=100, theta=[0.2, 0.8, 1.0])
    assert len(xs1) == len(ys1) == 100
    assert xs1 == xs2 and ys1 == ys2


def test_smc_tracks_the_exact_likelihood():
    xs, ys = pmcmc.simulate("lgss", seed=3, T=150, theta=[0.2, 0.8, 1.0])
    exact = pmcmc.kalman([0.2, 0.8, 1.0], ys)["loglik"]
    est = pmcmc.smc("lgss", seed=5, y=ys, theta=[0.2, 0.8, 1.0],
                    particles=2000, scheme="fully_adapted")
    assert not est["degenerate"]
    assert abs(est["loglik"] - exact) < 2.0
    assert len(est["grad"]) == 3


def test_smc_abc_runs_on_the_asv_model():
    xs, ys = pmcmc.simulate("asv", seed=11, T=60, theta=[0.2, 0.9, 0.3, 1.6])
    est = pmcmc.smc("asv", seed=13, y=ys, theta=[0.2, 0.9, 0.3, 1.6],
                    particles=300, scheme="abc", epsilon=0.1, lag=10)
    assert math.isfinite(est["loglik"])
    assert len(est["grad"]) == 4


def test_run_pmh_shapes():
    xs, ys = pmcmc.simulate("lgss", seed=17, T=60, theta=[0.2, 0.8, 1.0])
    out = pmcmc.run_pmh("lgss", seed=19, y=ys, theta0=[0.2, 0.8, 1.0],
                        iterations=300, burnin=100, proposal="qpmh2",
                        particles=50, scheme="fully_adapted", memory=30)
    assert out["trace"].shape == (301, 3)
    assert 0.0 < out["acceptance"] <= 1.0


def test_diagnostics_roundtrip():
    xs, ys = pmcmc.simulate("lgss", seed=23, T=50, theta=[0.2, 0.8, 1.0])
    acf = pmcmc.autocorrelation(ys, 5)
    assert acf[0] == pytest.approx(1.0)
    iff = pmcmc.inefficiency_factor(ys, adapted=True)
    assert iff > 0.0
    summary = pmcmc.posterior_summary([ys], burnin=-1)
    assert summary[0]["mean"] == pytest.approx(sum(ys) / len(ys), rel=1e-12)


def test_invalid_model_raises():
    with pytest.raises(ValueError):
        pmcmc.simulate("nope", seed=1, T=10, theta=[0.1])
