"""
Closed forms for a two-level system.

In the eigenbasis of the density matrix the temperature matrix is
``b*I + diag(-beta, +beta)``. With the gauge ``b = 0`` the partition function
is ``sinh(beta)/beta`` and the occupations are ``1/2 +- delta(beta)`` with
``delta(beta) = (coth(beta) - 1/beta)/2``, half the Langevin function.
``qubit_inverse_delta`` inverts ``delta``.
"""
import math

import numpy as np

from .errors import OutOfRange

SERIES_CUTOFF = 1e-4
# below this, coth(a) - 1/a loses ~eps/a^2 to cancellation; five series terms reach rounding level
LANGEVIN_SERIES_CUTOFF = 0.1
# Taylor coefficients of coth(a) - 1/a in odd powers of a
_LANGEVIN_SERIES = (1 / 3, -1 / 45, 2 / 945, -1 / 4725, 2 / 93555)

__all__ = ['qubit_partition', 'qubit_log_partition', 'qubit_delta',
           'qubit_delta_slope', 'qubit_inverse_delta']


def qubit_partition(beta):
    """``sinh(beta)/beta``, equal to 1 at ``beta = 0``."""
    beta = float(beta)
    if abs(beta) < SERIES_CUTOFF:
        b2 = beta * beta
        return 1.0 + b2 / 6.0 + b2 * b2 / 120.0
    return math.sinh(beta) / beta


def qubit_log_partition(beta):
    """``ln(sinh(beta)/beta)`` without overflow for large ``|beta|``."""
    a = abs(float(beta))
    if a < 1.0:
        return math.log(qubit_partition(a))
    return a + math.log1p(-math.exp(-2.0 * a)) - math.log(2.0 * a)


def _half_langevin(a):
    # a >= 0
    if a < SERIES_CUTOFF:
        return a / 6.0 - a ** 3 / 90.0
    if a < LANGEVIN_SERIES_CUTOFF:
        a2 = a * a
        acc = 0.0
        for c in reversed(_LANGEVIN_SERIES):
            acc = acc * a2 + c
        return 0.5 * a * acc
    return 0.5 * (1.0 / math.tanh(a) - 1.0 / a)


def qubit_delta(beta):
    """``(coth(beta) - 1/beta)/2``: odd, increasing, range (-1/2, 1/2)."""
    beta = float(beta)
    return math.copysign(_half_langevin(abs(beta)), beta)


def qubit_delta_slope(beta):
    """Derivative of :func:`qubit_delta`, ``(1/beta^2 - 1/sinh^2 beta)/2``."""
    a = abs(float(beta))
    if a < 1e-3:
        a2 = a * a
        return 1.0 / 6.0 - a2 / 30.0 + a2 * a2 / 189.0
    if a > 350.0:
        return 0.5 / (a * a)
    return 0.5 * (1.0 / a ** 2 - 1.0 / math.sinh(a) ** 2)


def _seed(delta):
    # Cohen's rational approximation to the inverse Langevin function.
    y = 2.0 * delta
    return y * (3.0 - y * y) / (1.0 - y * y)


def qubit_inverse_delta(delta, tol=1e-15, max_iter=100):
    """Inverse of :func:`qubit_delta`.

    Newton iteration seeded with a rational inverse-Langevin approximation.
    Raises :class:`OutOfRange` for ``|delta| >= 1/2``.
    """
    delta = float(delta)
    if not abs(delta) < 0.5:
        raise OutOfRange('|delta| = %r must be below 1/2' % abs(delta))
    d = abs(delta)
    if d == 0.0:
        return 0.0
    beta = _seed(d)
    for _ in range(max_iter):
        step = (_half_langevin(beta) - d) / qubit_delta_slope(beta)
        new = beta - step
        if new <= 0.0:
            new = 0.5 * beta
        if abs(new - beta) <= tol * max(1.0, new):
            beta = new
            break
        beta = new
    return math.copysign(beta, delta)


qubit_delta_vec = np.vectorize(qubit_delta, otypes=[float])
qubit_inverse_delta_vec = np.vectorize(qubit_inverse_delta, otypes=[float])
