"""
Fit the temperature matrix of a lazy ensemble to a target density matrix.

By unitary invariance of the Haar measure the averaging constraint is
diagonal in the eigenbasis of the target, so only the eigenvalues of the
temperature matrix are solved for. Eigenvectors are inherited from the
target. The temperature is defined up to adding a multiple of the identity;
:class:`Gauge` fixes that freedom.
"""
import enum
import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import partition as pf
from .errors import DimensionMismatch, NoConvergence, NotFullRange
from .spectra import (RANK_TOL, DensityMatrix, as_hermitian, expectation,
                      from_spectrum, validate_density)

logger = logging.getLogger(__name__)

CLUSTER_GAP = 1e-9

__all__ = ['Gauge', 'LazyEnsemble', 'fit_temperature', 'ensemble_from_temperature',
           'ensemble_density', 'log_density', 'regauge']


class Gauge(enum.Enum):
    TRACE_ZERO = 'trace-zero'
    LOGZ_ZERO = 'logz-zero'


@dataclass(frozen=True)
class LazyEnsemble:
    """A lazy ensemble ``mu(psi) = exp(-<psi|B|psi>) / Z``.

    ``nodes[k]`` is the eigenvalue of ``temperature`` belonging to column
    ``k`` of ``basis``; ``occupations[k]`` is the matching eigenvalue of the
    averaged density matrix ``target``.
    """
    temperature: np.ndarray
    nodes: np.ndarray
    basis: np.ndarray
    gauge: Optional[Gauge]
    log_z: float
    entropy: float
    occupations: np.ndarray
    target: DensityMatrix
    iterations: int = 0
    residual: float = 0.0

    @property
    def dim(self):
        return self.nodes.size

    @property
    def average_state(self):
        """Exact average projector of the ensemble (equals ``target`` up to the fit residual)."""
        return from_spectrum(self.occupations, self.basis)


def _gauge_shift(nodes, gauge):
    if gauge is Gauge.TRACE_ZERO:
        return -nodes.mean()
    # ln Z(b + c) = ln Z(b) - c
    return pf.log_partition(nodes)


def _assemble(nodes, basis, gauge, target=None, iterations=0, residual=0.0):
    gauge = Gauge(gauge)
    nodes = nodes + _gauge_shift(nodes, gauge)
    result = pf.partition_summary(nodes)
    if target is None:
        target = validate_density(from_spectrum(result.occupations, basis))
    return LazyEnsemble(
        temperature=from_spectrum(nodes, basis), nodes=nodes, basis=basis,
        gauge=gauge, log_z=result.log_z, entropy=result.entropy,
        occupations=result.occupations, target=target,
        iterations=iterations, residual=residual)


def _clusters(values, gap=CLUSTER_GAP):
    # values ascending; returns label per value
    labels = np.zeros(values.size, dtype=int)
    labels[1:] = np.cumsum(np.diff(values) > gap)
    return labels


def _solve_nodes(target, tol, max_iter):
    """Newton solve of ``mean_occupations(b) = target`` on the trace-zero slice.

    Degenerate target values share one node. Returns ``(nodes, iterations,
    residual)``.
    """
    labels = _clusters(target)
    k = labels[-1] + 1
    # indicator matrix: clusters x states
    ind = np.zeros((k, target.size))
    ind[labels, np.arange(target.size)] = 1.0
    mult = ind.sum(axis=1)
    want = ind @ target

    def expand(c):
        return c[labels]

    def resid(c):
        return ind @ pf.mean_occupations(expand(c)) - want

    c = -np.log(want / mult)
    c -= np.dot(mult, c) / target.size
    r = resid(c)
    err = np.max(np.abs(r / mult))
    it = 0
    while err > tol and it < max_iter:
        it += 1
        jac = ind @ pf.occupation_jacobian(expand(c)) @ ind.T
        step = -np.linalg.lstsq(jac, r, rcond=None)[0]
        step -= np.dot(mult, step) / target.size
        norm0 = np.linalg.norm(r)
        t = 1.0
        for _ in range(40):
            trial = c + t * step
            r_new = resid(trial)
            if np.linalg.norm(r_new) < norm0:
                break
            t *= 0.5
        else:
            raise NoConvergence('line search failed at residual %.3e' % err,
                                residual=err, iterations=it)
        c, r = trial, r_new
        err = np.max(np.abs(r / mult))
        logger.debug('newton %d: step %.3g, residual %.3e', it, t, err)
    if err > tol:
        raise NoConvergence('no convergence in %d iterations, residual %.3e'
                            % (max_iter, err), residual=err, iterations=it)
    return expand(c), it, err


def fit_temperature(rho, gauge=Gauge.TRACE_ZERO, tol=1e-10, max_iter=60):
    """Find the lazy ensemble whose average state is ``rho``.

    Parameters
    ----------
    rho : array_like or DensityMatrix
        Target density matrix; must be full-range.
    gauge : Gauge or str
        Additive gauge applied to the result.
    tol : float
        Max-norm tolerance on the occupation residual, at least 1e-12.
    max_iter : int
        Newton iteration budget.

    Raises
    ------
    NotFullRange
        If an eigenvalue of ``rho`` is at most ``RANK_TOL``.
    NoConvergence
        If the budget is exhausted; carries the final residual.
    """
    if not isinstance(rho, DensityMatrix):
        rho = validate_density(rho)
    if tol < 1e-12:
        raise ValueError('tol must be at least 1e-12, got %r' % tol)
    if not rho.full_range:
        raise NotFullRange('density matrix is not full-range: smallest '
                           'eigenvalue %.3e <= %.0e' % (rho.eigenvalues[0], RANK_TOL))
    target = rho.eigenvalues / rho.eigenvalues.sum()
    nodes, it, err = _solve_nodes(target, tol, max_iter)
    return _assemble(nodes, rho.eigenvectors, gauge, target=rho,
                     iterations=it, residual=err)


def ensemble_from_temperature(b_matrix, gauge=None):
    """Lazy ensemble for a given Hermitian temperature matrix.

    With ``gauge=None`` the matrix is kept exactly as given and the
    ensemble's ``gauge`` is ``None``.
    """
    h = as_hermitian(b_matrix)
    nodes, basis = np.linalg.eigh(h)
    if gauge is not None:
        return _assemble(nodes, basis, gauge)
    ens = _assemble(nodes, basis, Gauge.TRACE_ZERO)
    shift = nodes.mean()
    return replace(ens, temperature=h, nodes=nodes, log_z=ens.log_z - shift,
                   gauge=None)


def log_density(ens, psi):
    """``ln mu(psi)`` for one state or a stack of states (rows)."""
    psi = np.asarray(psi)
    if psi.shape[-1] != ens.dim:
        raise DimensionMismatch('state has length %d, ensemble dimension is %d'
                                % (psi.shape[-1], ens.dim))
    return -expectation(ens.temperature, psi) - ens.log_z


def ensemble_density(ens, psi):
    """Density of the ensemble w.r.t. the normalized unitary-invariant measure."""
    return np.exp(log_density(ens, psi))


def regauge(ens, gauge):
    """Shift the temperature by a multiple of the identity to meet ``gauge``.

    Occupations, entropy and densities are unchanged.
    """
    gauge = Gauge(gauge)
    c = _gauge_shift(ens.nodes, gauge)
    if gauge is Gauge.TRACE_ZERO:
        log_z = ens.log_z - c
    else:
        log_z = 0.0
    nodes = ens.nodes + c
    return replace(ens, nodes=nodes, gauge=gauge, log_z=log_z,
                   temperature=ens.temperature + c * np.eye(ens.dim))
