import math

import numpy as np
import pytest
from scipy import integrate

from lazy_ensembles.errors import EmptyBatch, SourceMismatch, SpreadTooLarge
from lazy_ensembles.inverse import Gauge, ensemble_from_temperature, fit_temperature, regauge
from lazy_ensembles.sampler import (RandomStream, SampleBatch, empirical_density_matrix,
                                    estimate_entropy, merge_batches, predicted_acceptance,
                                    sample_haar, sample_lazy)
from lazy_ensembles.spectra import projector

from conftest import random_unitary

D1 = 0.5 * (1 / math.tanh(1) - 1)
QUBIT = ensemble_from_temperature(np.diag([-1.0, 1.0]))


def test_haar_single_dimension():
    psi = sample_haar(1, RandomStream(1))
    assert abs(abs(psi[0]) - 1) < 1e-15
    np.testing.assert_allclose(projector(psi), [[1.0]])


def test_haar_mean_projector():
    psi = sample_haar(2, RandomStream(2), 100000)
    avg = psi.T @ psi.conj() / psi.shape[0]
    assert np.max(np.abs(avg - np.eye(2) / 2)) <= 5e-3


def test_haar_fourth_moment():
    n = 4
    # |psi_1|^2 ~ Beta(1, n-1): integrate x^2 (n-1)(1-x)^(n-2) over [0, 1]
    oracle = integrate.quad(lambda x: x * x * (n - 1) * (1 - x) ** (n - 2), 0, 1)[0]
    assert oracle == pytest.approx(2 / (n * (n + 1)), abs=1e-12)
    psi = sample_haar(n, RandomStream(3), 100000)
    assert np.mean(np.abs(psi[:, 0]) ** 4) == pytest.approx(oracle, abs=5e-3)


def test_determinism():
    a = sample_lazy(QUBIT, 500, RandomStream(42))
    b = sample_lazy(QUBIT, 500, RandomStream(42))
    assert a.proposed == b.proposed
    assert np.array_equal(a.states, b.states)


def test_split_streams_differ():
    s1, s2 = RandomStream(9).split(2)
    assert not np.array_equal(sample_haar(3, s1, 5), sample_haar(3, s2, 5))


def test_uniform_acceptance():
    ens = fit_temperature(np.eye(3) / 3)
    batch = sample_lazy(ens, 2000, RandomStream(4))
    assert batch.proposed == batch.accepted == 2000
    assert predicted_acceptance(ens) == 1.0
    est, se = estimate_entropy(batch, ens)
    assert est == 0.0 and se == 0.0


def test_predicted_acceptance_values():
    assert predicted_acceptance(QUBIT) == pytest.approx(math.sinh(1) / math.e, rel=1e-13)
    assert predicted_acceptance(QUBIT) == pytest.approx(0.4323324, abs=5e-8)
    three = ensemble_from_temperature(np.diag([0.0, 1.0, 2.0]))
    assert predicted_acceptance(three) == pytest.approx(0.3995764, abs=5e-8)


def test_acceptance_rate_law():
    batch = sample_lazy(QUBIT, 4323, RandomStream(5))
    p = predicted_acceptance(QUBIT)
    assert abs(batch.acceptance_rate - p) <= 4 * math.sqrt(p * (1 - p) / batch.proposed)


def test_lazy_qubit_moments():
    batch = sample_lazy(QUBIT, 100000, RandomStream(6))
    emp = empirical_density_matrix(batch)
    np.testing.assert_allclose(emp.eigenvalues[::-1], [0.5 + D1, 0.5 - D1], atol=5e-3)
    # entrywise within 3 standard errors of the target
    s = batch.states
    proj = np.einsum('ki,kj->kij', s, s.conj())
    se = proj.std(axis=0, ddof=1) / math.sqrt(batch.accepted)
    dev = np.abs(emp.matrix - QUBIT.target.matrix)
    assert np.all(dev <= 3 * se + 1e-12)


def test_moment_closure_n4(rng):
    u = random_unitary(4, rng)
    ens = fit_temperature((u * np.array([0.1, 0.2, 0.3, 0.4])) @ u.conj().T)
    batch = sample_lazy(ens, 100000, RandomStream(8))
    emp = empirical_density_matrix(batch)
    assert np.max(np.abs(emp.matrix - ens.target.matrix)) <= 5e-3


def test_unitary_covariance(rng):
    b = np.diag([-0.8, 0.1, 0.9])
    u = random_unitary(3, rng)
    plain = sample_lazy(ensemble_from_temperature(b), 10000, RandomStream(12))
    rotated = sample_lazy(ensemble_from_temperature(u @ b @ u.conj().T), 10000, RandomStream(13))
    back = rotated.states @ u.conj()  # apply U^dagger to each row
    for s1, s2 in ((plain.states, back),):
        m1 = np.abs(s1) ** 2
        m2 = np.abs(s2) ** 2
        diff = m1.mean(0) - m2.mean(0)
        se = np.sqrt(m1.var(0, ddof=1) / len(m1) + m2.var(0, ddof=1) / len(m2))
        assert np.all(np.abs(diff) <= 3 * se)


@pytest.mark.parametrize('beta', [0.5, 1.0, 2.0, 4.0])
def test_entropy_closure(beta):
    ens = ensemble_from_temperature(np.diag([-beta, beta]))
    batch = sample_lazy(ens, 100000, RandomStream(int(beta * 100)))
    est, se = estimate_entropy(batch, ens)
    assert abs(est - ens.entropy) <= 3 * se
    assert est >= -3 * se


def test_entropy_estimate_gauge_independent_source():
    ens = fit_temperature(np.diag([0.3, 0.7]))
    batch = sample_lazy(ens, 1000, RandomStream(1))
    est, _ = estimate_entropy(batch, regauge(ens, Gauge.LOGZ_ZERO))
    assert est == pytest.approx(estimate_entropy(batch, ens)[0], abs=1e-12)


def test_source_mismatch():
    batch = sample_lazy(QUBIT, 10, RandomStream(1))
    other = ensemble_from_temperature(np.diag([-2.0, 2.0]))
    with pytest.raises(SourceMismatch):
        estimate_entropy(batch, other)


def test_spread_guard():
    with pytest.raises(SpreadTooLarge):
        sample_lazy(ensemble_from_temperature(np.diag([0.0, 60.0])), 10, RandomStream(0))


def test_empty_batch():
    empty = SampleBatch(2, np.zeros((0, 2), complex), 0, 'haar')
    with pytest.raises(EmptyBatch):
        empirical_density_matrix(empty)


def test_empirical_examples():
    one = SampleBatch(2, np.array([[1, 0]], complex), 1, 'haar')
    np.testing.assert_allclose(empirical_density_matrix(one).matrix, np.diag([1.0, 0.0]))
    two = SampleBatch(2, np.eye(2, dtype=complex), 2, 'haar')
    np.testing.assert_allclose(empirical_density_matrix(two).matrix, np.eye(2) / 2)


def test_merge_is_order_independent():
    s1, s2 = RandomStream(3).split(2)
    a = sample_lazy(QUBIT, 300, s1)
    b = sample_lazy(QUBIT, 200, s2)
    ab, ba = merge_batches(a, b), merge_batches(b, a)
    assert ab.proposed == ba.proposed
    np.testing.assert_allclose(empirical_density_matrix(ab).matrix,
                               empirical_density_matrix(ba).matrix, atol=1e-14)
    assert estimate_entropy(ab, QUBIT)[0] == pytest.approx(estimate_entropy(ba, QUBIT)[0], abs=1e-14)
