"""
Partition function of the lazy ensemble and its derivatives.

For a temperature matrix with eigenvalues ``b`` (the nodes), the partition
function over the normalized unitary-invariant measure is

    Z(b) = (n - 1)! * DD[exp](-b_1, ..., -b_n)

where ``DD[exp]`` is the divided difference of the exponential. Divided
differences are read off the exponential of the upper bidiagonal matrix that
carries the nodes on its diagonal and ones on its superdiagonal: entry
``(i, j)`` of that exponential is the divided difference on nodes ``i..j``.
This handles repeated nodes (the confluent limit) with no special cases.

Everything is carried in log-space. Nodes are shifted by their minimum
before exponentiating so the bidiagonal matrix has a non-positive diagonal.

Sign conventions: the ensemble density is ``exp(-<psi|B|psi>) / Z`` so the
occupations are ``lambda_s = -d ln Z / d b_s`` and the differential entropy is
``S = -sum_s b_s lambda_s - ln Z``.
"""
from dataclasses import dataclass
from math import lgamma

import numpy as np
from scipy.linalg import expm

from .errors import ContourTooTight, NonFiniteNode, TooManyNodes

MAX_NODES = 32

__all__ = ['PartitionResult', 'temperature_spectrum', 'divided_difference_exp',
           'log_partition', 'mean_occupations', 'occupation_jacobian',
           'differential_entropy', 'partition_summary', 'partition_contour',
           'MAX_NODES']


def temperature_spectrum(b):
    """Validate a node sequence and return it as a float array (order kept)."""
    x = np.atleast_1d(np.asarray(b, dtype=float))
    if x.ndim != 1 or x.size == 0:
        raise TooManyNodes('need a non-empty 1-d sequence of nodes')
    if x.size > MAX_NODES:
        raise TooManyNodes('%d nodes exceed the cap of %d' % (x.size, MAX_NODES))
    if not np.all(np.isfinite(x)):
        raise NonFiniteNode('nodes must be finite: %r' % (x,))
    return x


def _bidiagonal(nodes):
    nodes = np.asarray(nodes, dtype=float)
    m = nodes.shape[-1]
    a = np.zeros(nodes.shape + (m,))
    idx = np.arange(m)
    a[..., idx, idx] = nodes
    a[..., idx[:-1], idx[1:]] = 1.0
    return a


def divided_difference_exp(nodes):
    """Divided difference of ``exp`` on ``nodes`` (repeats allowed).

    >>> divided_difference_exp([0.0, 0.0, 0.0])
    0.5
    """
    x = temperature_spectrum(nodes)
    if x.size == 1:
        return float(np.exp(x[0]))
    top = x.max()
    return float(np.exp(top) * expm(_bidiagonal(x - top))[0, -1])


def _shifted(b):
    b = temperature_spectrum(b)
    lo = b.min()
    return b, lo, -(b - lo)


def log_partition(b):
    """Natural log of the partition function for node vector ``b``."""
    b, lo, x = _shifted(b)
    n = b.size
    if n == 1 or b.max() == lo:
        return float(-lo)
    dd = expm(_bidiagonal(x))[0, -1]
    return float(lgamma(n) + np.log(dd) - lo)


def _occupation_table(x):
    # Nodes (x, x): entry (s, n + s) is DD on all nodes with x_s doubled,
    # entry (0, n - 1) is DD on the plain nodes.
    n = x.size
    f = expm(_bidiagonal(np.concatenate([x, x])))
    idx = np.arange(n)
    return f[0, n - 1], f[idx, n + idx]


def mean_occupations(b):
    """Occupations ``lambda_s = -d ln Z / d b_s``, aligned with ``b``.

    They are positive, sum to one, and a larger node gets a smaller
    occupation.
    """
    b, _, x = _shifted(b)
    if b.size == 1:
        return np.ones(1)
    dd, doubled = _occupation_table(x)
    lam = doubled / dd
    return lam / lam.sum()


def _second_table(x):
    # Nodes (x, x_0, x, x_1, ..., x, x_{n-1}, x). In block k, the window from
    # x_i to the next copy of x_i holds every node once plus x_k and x_i.
    n = x.size
    y = np.concatenate([np.append(x, xk) for xk in x] + [x])
    f = expm(_bidiagonal(y))
    off = (n + 1) * np.arange(n)[:, None] + np.arange(n)[None, :]
    second = f[off, off + n + 1]
    return f[0, n - 1], f[off[:, 0], off[:, 0] + n], second


def occupation_jacobian(b):
    """Jacobian ``d lambda_s / d b_t`` (symmetric, negative semidefinite).

    Uses the second derivatives of the divided difference: differentiating a
    divided difference in a node that appears ``k`` times gives ``k`` times
    the divided difference with that node appearing once more.
    """
    b, _, x = _shifted(b)
    n = b.size
    if n == 1:
        return np.zeros((1, 1))
    dd, doubled, second = _second_table(x)
    second = 0.5 * (second + second.T) * (1.0 + np.eye(n))
    jac = (np.outer(doubled, doubled) - second * dd) / dd ** 2
    return 0.5 * (jac + jac.T)


@dataclass(frozen=True)
class PartitionResult:
    log_z: float
    occupations: np.ndarray
    entropy: float


def _entropy(b, lam, log_z):
    # Gauge-fixed to b_min = 0 so the cancellation is the same for every gauge.
    lo = b.min()
    if b.max() == lo:
        return 0.0
    s = -np.dot(b - lo, lam) - (log_z + lo)
    return max(float(s), 0.0)


def differential_entropy(b):
    """Differential entropy (KL divergence from uniform) of the ensemble."""
    b = temperature_spectrum(b)
    return _entropy(b, mean_occupations(b), log_partition(b))


def partition_summary(b):
    """Log partition function, occupations and entropy in one call."""
    b = temperature_spectrum(b)
    log_z = log_partition(b)
    lam = mean_occupations(b)
    return PartitionResult(log_z, lam, _entropy(b, lam, log_z))


def partition_contour(b, points=512):
    """Partition function from the contour-integral representation.

    Evaluates ``-(n-1)!/(2 pi i) * integral exp(-z) dz / det(B - z I)`` with
    the trapezoidal rule on a circle centred at ``mean(b)`` of radius
    ``max|b - centre| + 1``. Independent of the divided-difference path, so
    it is used as an oracle for :func:`log_partition`. Returns ``Z`` itself,
    not its log.
    """
    b = temperature_spectrum(b)
    points = int(points)
    if points < 64:
        raise ValueError('need at least 64 quadrature points, got %d' % points)
    n = b.size
    centre = b.mean()
    shifted = b - centre
    margin = 1.0
    radius = np.max(np.abs(shifted)) + margin
    if radius - np.max(np.abs(shifted)) <= 0:
        raise ContourTooTight('contour does not enclose all nodes')
    w = radius * np.exp(2j * np.pi * np.arange(points) / points)
    det = np.prod(shifted[None, :] - w[:, None], axis=1)
    # dz / (2 pi i) = w d(theta) / (2 pi)
    integral = np.mean(np.exp(-w) * w / det)
    z = -np.exp(lgamma(n) - centre) * integral
    return float(z.real)
