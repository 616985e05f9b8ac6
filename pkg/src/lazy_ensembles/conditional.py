"""
Conditional lazy ensembles: a single scalar constraint on ``<H>``.

The ensemble is ``exp(-beta <psi|H|psi>) / Z_H(beta)``, i.e. the lazy ensemble
with temperature ``beta * H``. The mean ``<H>`` is strictly decreasing in
``beta``, which makes the scalar fit a one-dimensional monotone root find.

For two non-interacting systems the ensemble is taken over product states
``psi (x) psi'`` and the observable is the Kronecker sum
``H (x) I + I (x) H'``. Its partition function factorizes, and the joint
``beta`` lies between the two marginal ones.
"""
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from . import partition as pf
from .errors import ScalarObservable, TargetUnattainable
from .sampler import RandomStream, sample_haar
from .spectra import as_hermitian, expectation

SCALAR_SPREAD = 1e-12
LOG_RANGE = 700.0

__all__ = ['Observable', 'ConditionalEnsemble', 'FactorizationReport',
           'as_observable', 'conditional_mean', 'fit_conditional', 'compose',
           'joint_fit', 'factorization_check']


@dataclass(frozen=True)
class Observable:
    matrix: np.ndarray
    spectrum: np.ndarray

    @classmethod
    def from_matrix(cls, m):
        h = as_hermitian(m)
        return cls(h, np.linalg.eigvalsh(h))

    @property
    def dim(self):
        return self.spectrum.size

    @property
    def spread(self):
        return float(self.spectrum[-1] - self.spectrum[0])


def as_observable(h):
    return h if isinstance(h, Observable) else Observable.from_matrix(h)


@dataclass(frozen=True)
class ConditionalEnsemble:
    """Fitted conditional ensemble.

    For a composite fit ``factors`` holds the subsystem observables and
    ``mean``/``log_z`` refer to the ensemble over product states.
    """
    observable: Observable
    beta: float
    log_z: float
    mean: float
    factors: Tuple[Observable, ...] = field(default=())


def _mean_slope(spectrum, beta):
    nodes = beta * spectrum
    lam = pf.mean_occupations(nodes)
    jac = pf.occupation_jacobian(nodes)
    return float(spectrum @ lam), float(spectrum @ jac @ spectrum)


def conditional_mean(h, beta):
    """Mean of ``<psi|H|psi>`` under ``exp(-beta <psi|H|psi>) / Z``."""
    h = as_observable(h)
    return _mean_slope(h.spectrum, float(beta))[0]


def _solve_decreasing(fn, target, beta_max, tol, max_iter=200):
    """Root of a decreasing ``fn`` (returning value and slope) on a bracket.

    Newton steps, falling back to bisection when a step leaves the bracket
    or fails to shrink it.
    """
    lo, hi = -beta_max, beta_max
    g_lo, g_hi = fn(lo)[0], fn(hi)[0]
    if not g_hi < target < g_lo:
        raise TargetUnattainable(
            'target %.12g outside the reachable range (%.12g, %.12g)' % (target, g_hi, g_lo))
    beta = 0.0
    for _ in range(max_iter):
        g, slope = fn(beta)
        if abs(g - target) <= tol:
            return beta, g
        if g > target:
            lo = beta
        else:
            hi = beta
        new = beta - (g - target) / slope if slope < 0 else np.nan
        if not lo < new < hi:
            new = 0.5 * (lo + hi)
        if new == beta or hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(beta)):
            return beta, g
        beta = new
    return beta, fn(beta)[0]


def fit_conditional(h, target_mean, tol=1e-10):
    """Find ``beta`` with ``conditional_mean(h, beta) = target_mean``.

    Raises
    ------
    ScalarObservable
        ``h`` is a multiple of the identity, so there is nothing to fit.
    TargetUnattainable
        The target is not strictly inside the spectral range of ``h``.
    """
    h = as_observable(h)
    t = float(target_mean)
    if h.spread <= SCALAR_SPREAD:
        raise ScalarObservable('observable has spectral spread %.3g' % h.spread)
    if not h.spectrum[0] < t < h.spectrum[-1]:
        raise TargetUnattainable('target %.12g not inside (%.12g, %.12g)'
                                 % (t, h.spectrum[0], h.spectrum[-1]))
    beta, mean = _solve_decreasing(lambda x: _mean_slope(h.spectrum, x), t,
                                   LOG_RANGE / h.spread, tol)
    return ConditionalEnsemble(h, beta, pf.log_partition(beta * h.spectrum), mean)


def compose(h, g):
    """Kronecker-sum observable ``H (x) I + I (x) G``."""
    h, g = as_observable(h), as_observable(g)
    m = np.kron(h.matrix, np.eye(g.dim)) + np.kron(np.eye(h.dim), g.matrix)
    spectrum = np.sort(np.add.outer(h.spectrum, g.spectrum).ravel())
    return Observable(m, spectrum)


def _factors(ens):
    return ens.factors if ens.factors else (ens.observable,)


def _product_log_partition(factors, beta):
    # Fubini over independent Haar factors
    return float(sum(pf.log_partition(beta * f.spectrum) for f in factors))


def joint_fit(cond_a, cond_b, tol=1e-10):
    """Common ``beta`` for two subsystems measured through the sum observable.

    The target is the sum of the subsystem means; over product states the
    joint mean is the sum of the marginal conditional means at a common
    ``beta``. The result lies between ``cond_a.beta`` and ``cond_b.beta``.
    """
    factors = _factors(cond_a) + _factors(cond_b)
    spread = max(f.spread for f in factors)
    if spread <= SCALAR_SPREAD:
        raise ScalarObservable('all subsystem observables are scalar')
    target = cond_a.mean + cond_b.mean

    def fn(beta):
        vals = [_mean_slope(f.spectrum, beta) for f in factors]
        return sum(v[0] for v in vals), sum(v[1] for v in vals)

    beta, mean = _solve_decreasing(fn, target, LOG_RANGE / spread, tol)
    joint = compose(cond_a.observable, cond_b.observable)
    return ConditionalEnsemble(joint, beta, _product_log_partition(factors, beta),
                               mean, factors)


@dataclass(frozen=True)
class FactorizationReport:
    residual: float
    log_z: float
    mc_estimate: float = float('nan')
    mc_stderr: float = float('nan')
    mc_samples: int = 0

    @property
    def mc_deviation(self):
        """Monte Carlo error in units of its standard error."""
        err = abs(self.mc_estimate - np.exp(self.log_z))
        if self.mc_stderr == 0.0:
            return 0.0 if err <= 1e-12 * np.exp(self.log_z) else float('inf')
        return err / self.mc_stderr

    def passed(self, tol=1e-12, sigmas=3.0):
        ok = self.residual <= tol
        if self.mc_samples:
            ok = ok and self.mc_deviation <= sigmas
        return bool(ok)


def factorization_check(h, g, tau, samples=0, stream=None):
    """Check ``Z_(H+H')(tau) = Z_H(tau) Z_H'(tau)`` over product states.

    The analytic residual compares the product-state log partition function
    (marginal ensembles at a common ``tau``) against the sum of the separate
    log partition functions. With ``samples > 0`` the product-state
    normalization is also estimated by Monte Carlo, by drawing independent
    Haar states for each factor and evaluating the sum observable on their
    tensor product.
    """
    h, g = as_observable(h), as_observable(g)
    tau = float(tau)
    product_log_z = _product_log_partition((h, g), tau)
    direct = pf.log_partition(tau * h.spectrum) + pf.log_partition(tau * g.spectrum)
    residual = abs(product_log_z - direct)
    if not samples:
        return FactorizationReport(residual, direct)

    stream = stream if stream is not None else RandomStream(0)
    joint = compose(h, g)
    psi = sample_haar(h.dim, stream, samples)
    phi = sample_haar(g.dim, stream, samples)
    prod = (psi[:, :, None] * phi[:, None, :]).reshape(samples, -1)
    energy = tau * expectation(joint.matrix, prod)
    ref = min(tau * joint.spectrum[0], tau * joint.spectrum[-1])
    w = np.exp(-(energy - ref))
    scale = np.exp(-ref)
    est = float(w.mean() * scale)
    se = float(w.std(ddof=1) / np.sqrt(samples) * scale)
    return FactorizationReport(residual, direct, est, se, int(samples))
