import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lazy_ensembles.conditional import (ConditionalEnsemble, Observable, compose,
                                        conditional_mean, factorization_check,
                                        fit_conditional, joint_fit)
from lazy_ensembles.errors import ScalarObservable, TargetUnattainable
from lazy_ensembles.inverse import fit_temperature
from lazy_ensembles.partition import log_partition, mean_occupations
from lazy_ensembles.sampler import RandomStream

from conftest import random_hermitian

SZ = np.diag([1.0, -1.0])
MEAN_AT_1 = -(1 / math.tanh(1) - 1)  # -2 delta(1)


def brute_joint_beta(fa, fb, target, lo=-50.0, hi=50.0):
    """Plain bisection on the summed marginal means."""
    g = lambda t: conditional_mean(fa, t) + conditional_mean(fb, t)  # noqa: E731
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_mean_examples(rng):
    h = random_hermitian(4, rng)
    assert conditional_mean(h, 0.0) == pytest.approx(np.trace(h).real / 4, abs=1e-14)
    assert conditional_mean(SZ, 1.0) == pytest.approx(MEAN_AT_1, abs=1e-14)
    assert MEAN_AT_1 == pytest.approx(-0.3130353, abs=5e-8)
    assert conditional_mean(2.5 * np.eye(3), 0.7) == pytest.approx(2.5, abs=1e-14)


def test_mean_monotone_and_limits(rng):
    h = Observable.from_matrix(random_hermitian(3, rng))
    grid = np.linspace(-20, 20, 100)
    vals = [conditional_mean(h, b) for b in grid]
    assert np.all(np.diff(vals) < 0)
    assert conditional_mean(h, 1e4) == pytest.approx(h.spectrum[0], abs=2e-3 * h.spread)
    assert conditional_mean(h, -1e4) == pytest.approx(h.spectrum[-1], abs=2e-3 * h.spread)


def test_fit_examples():
    assert fit_conditional(SZ, 0.0).beta == 0.0
    assert fit_conditional(SZ, MEAN_AT_1).beta == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(TargetUnattainable):
        fit_conditional(SZ, 1.0)
    with pytest.raises(ScalarObservable):
        fit_conditional(np.eye(2), 1.0)


def test_fit_caches_log_partition():
    c = fit_conditional(SZ, -0.5)
    assert c.log_z == pytest.approx(log_partition(c.beta * np.array([-1.0, 1.0])), abs=1e-14)
    assert abs(conditional_mean(SZ, c.beta) - (-0.5)) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95), st.floats(-3, 3), st.floats(0.2, 5))
def test_shift_and_scale_covariance(seed, frac, shift, scale):
    h = random_hermitian(3, np.random.default_rng(seed))
    lo, hi = np.linalg.eigvalsh(h)[[0, -1]]
    t = lo + frac * (hi - lo)
    beta = fit_conditional(h, t).beta
    assert fit_conditional(h + shift * np.eye(3), t + shift).beta == pytest.approx(beta, abs=1e-7, rel=1e-7)
    assert fit_conditional(scale * h, scale * t).beta == pytest.approx(beta / scale, abs=1e-7, rel=1e-7)


def test_consistency_with_matrix_fit(rng):
    h = random_hermitian(4, rng)
    beta = 0.73
    w, v = np.linalg.eigh(h)
    lam = mean_occupations(beta * w)
    rho = (v * lam) @ v.conj().T
    ens = fit_temperature(rho)
    t = np.trace(h @ ens.target.matrix).real
    assert fit_conditional(h, t, tol=1e-13).beta == pytest.approx(beta, abs=1e-9)


def test_compose_spectrum(rng):
    np.testing.assert_allclose(compose(SZ, SZ).spectrum, [-2, 0, 0, 2])
    g = random_hermitian(3, rng)
    c = compose(np.zeros((2, 2)), g)
    np.testing.assert_allclose(c.spectrum, np.sort(np.repeat(np.linalg.eigvalsh(g), 2)), atol=1e-12)
    for _ in range(10):
        a, b = random_hermitian(2, rng), random_hermitian(3, rng)
        pairs = np.sort(np.add.outer(np.linalg.eigvalsh(a), np.linalg.eigvalsh(b)).ravel())
        np.testing.assert_allclose(np.linalg.eigvalsh(compose(a, b).matrix), pairs, atol=1e-10)


def test_joint_equal_temperatures():
    a = fit_conditional(SZ, conditional_mean(SZ, 0.8))
    b = fit_conditional(2 * SZ, conditional_mean(2 * SZ, 0.8))
    assert joint_fit(a, b).beta == pytest.approx(0.8, abs=1e-9)


def test_joint_qubit_pair():
    a = fit_conditional(SZ, conditional_mean(SZ, 0.5))
    b = fit_conditional(SZ, conditional_mean(SZ, 2.0))
    j = joint_fit(a, b)
    assert 0.5 < j.beta < 2.0
    oracle = brute_joint_beta(SZ, SZ, a.mean + b.mean)
    assert j.beta == pytest.approx(oracle, abs=1e-8)
    assert j.observable.dim == 4
    assert j.log_z == pytest.approx(2 * log_partition([-j.beta, j.beta]), abs=1e-12)


def test_joint_with_scalar_partner():
    a = fit_conditional(SZ, -0.4)
    scalar = Observable.from_matrix(3.0 * np.eye(2))
    inert = ConditionalEnsemble(scalar, 5.0, -15.0, 3.0)
    assert joint_fit(a, inert).beta == pytest.approx(a.beta, abs=1e-9)


def test_betweenness_random(rng):
    for _ in range(100):
        n, m = rng.integers(2, 4, size=2)
        h, g = random_hermitian(n, rng), random_hermitian(m, rng)
        a = fit_conditional(h, conditional_mean(h, rng.uniform(-3, 3)))
        b = fit_conditional(g, conditional_mean(g, rng.uniform(-3, 3)))
        j = joint_fit(a, b)
        lo, hi = sorted((a.beta, b.beta))
        assert lo - 1e-9 <= j.beta <= hi + 1e-9
        if hi - lo > 1e-6:
            assert lo < j.beta < hi


@pytest.mark.parametrize('tau', [0.0, 1.0, -3.0])
def test_factorization_analytic(tau):
    rep = factorization_check(SZ, SZ, tau)
    assert rep.residual <= 1e-12
    assert rep.passed()


def test_factorization_zero_tau_exact():
    assert factorization_check(SZ, SZ, 0.0).residual == 0.0


def test_factorization_monte_carlo():
    rep = factorization_check(SZ, SZ, 1.0, samples=100000, stream=RandomStream(21))
    assert rep.log_z == pytest.approx(2 * math.log(math.sinh(1)), abs=1e-12)
    assert rep.mc_deviation <= 3
    assert rep.passed()
