"""
Dense complex-Hermitian linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays. The helpers here validate them
(Hermitian, density matrix, pure state) and provide the few spectral
operations the rest of the code needs. Eigenvalues are always returned in
ascending order.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (DimensionMismatch, NotHermitian, NotNormalized,
                     NotPositive, TraceNotOne, ValidationError)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
NORM_TOL = 1e-12
PSD_TOL = 1e-10
RANK_TOL = 1e-10

__all__ = ['DensityMatrix', 'EigenDecomposition', 'as_matrix', 'as_hermitian',
           'as_pure_state', 'validate_density', 'eigh', 'projector',
           'expectation', 'from_spectrum']


def as_matrix(m):
    """Return ``m`` as a 2-d complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValidationError('expected a 2-d matrix, got shape %s' % (a.shape,))
    return a


def as_hermitian(m, tol=HERMITIAN_TOL):
    """Validate that ``m`` is Hermitian and return its symmetrised copy.

    The check is relative to the largest absolute entry. The error message
    names the entry with the largest violation.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch('matrix is not square: shape %s' % (a.shape,))
    scale = np.max(np.abs(a)) if a.size else 0.0
    diff = np.abs(a - a.conj().T)
    worst = float(np.max(diff)) if a.size else 0.0
    if worst > tol * max(scale, np.finfo(float).tiny):
        i, j = np.unravel_index(np.argmax(diff), diff.shape)
        raise NotHermitian(
            'matrix is not Hermitian: entry (%d, %d) = %r but entry (%d, %d) = %r'
            % (i, j, complex(a[i, j]), j, i, complex(a[j, i])))
    return 0.5 * (a + a.conj().T)


class EigenDecomposition(NamedTuple):
    values: np.ndarray   # ascending, real
    vectors: np.ndarray  # unitary, columns are eigenvectors

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.conj().T


def eigh(m):
    """Eigendecomposition of a Hermitian matrix with ascending spectrum."""
    h = as_hermitian(m)
    values, vectors = np.linalg.eigh(h)
    return EigenDecomposition(values, vectors)


def from_spectrum(values, vectors):
    """Assemble ``U diag(values) U^dagger``."""
    values = np.asarray(values, dtype=float)
    vectors = np.asarray(vectors, dtype=complex)
    return (vectors * values) @ vectors.conj().T


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density matrix.

    Attributes
    ----------
    matrix : ndarray
        Hermitian, unit trace, positive semidefinite.
    eigenvalues : ndarray
        Ascending spectrum.
    eigenvectors : ndarray
        Unitary whose columns pair with ``eigenvalues``.
    full_range : bool
        True when the smallest eigenvalue exceeds ``RANK_TOL``.
    """
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    full_range: bool

    @property
    def dim(self):
        return self.matrix.shape[0]


def validate_density(m):
    """Check the density-matrix axioms and return a :class:`DensityMatrix`.

    Raises
    ------
    NotHermitian, TraceNotOne, NotPositive
        Naming the violated invariant.
    """
    h = as_hermitian(m)
    tr = np.trace(h).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceNotOne('trace is %.15g, expected 1' % tr)
    values, vectors = np.linalg.eigh(h)
    if values[0] < -PSD_TOL:
        raise NotPositive('smallest eigenvalue is %.3e < 0' % values[0])
    return DensityMatrix(h, values, vectors, bool(values[0] > RANK_TOL))


def as_pure_state(psi, tol=NORM_TOL):
    """Return ``psi`` as a complex vector, checking unit norm."""
    v = np.asarray(psi, dtype=complex)
    if v.ndim != 1:
        raise ValidationError('a pure state is a 1-d vector, got shape %s' % (v.shape,))
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise NotNormalized('state norm is %.15g, expected 1' % norm)
    return v


def projector(psi):
    """Rank-one projector ``|psi><psi|``."""
    v = as_pure_state(psi)
    return np.outer(v, v.conj())


def expectation(h, psi):
    """``<psi|h|psi>`` for a single state or a stack of states (rows)."""
    h = np.asarray(h, dtype=complex)
    v = np.asarray(psi, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or v.shape[-1] != h.shape[0]:
        raise DimensionMismatch('observable of shape %s and state of length %d'
                                % (h.shape, v.shape[-1]))
    return np.einsum('...i,ij,...j->...', v.conj(), h, v).real
