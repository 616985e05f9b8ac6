"""
Monte Carlo over pure states.

Haar-random states are normalized standard complex Gaussian vectors. Lazy
ensembles are sampled exactly by rejection against the Haar proposal: the
exponent ``<psi|B|psi>`` lies in ``[b_min, b_max]`` so
``exp(-(<psi|B|psi> - b_min))`` is a valid acceptance probability.
"""
import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBatch, SourceMismatch, SpreadTooLarge
from .inverse import log_density
from .partition import log_partition
from .spectra import expectation, validate_density

MAX_SPREAD = 50.0
HAAR_SOURCE = 'haar'

__all__ = ['RandomStream', 'SampleBatch', 'sample_haar', 'sample_lazy',
           'empirical_density_matrix', 'estimate_entropy',
           'predicted_acceptance', 'ensemble_source', 'merge_batches']


class RandomStream:
    """Seeded counter-based stream (Philox) that can be split.

    Children from :meth:`split` use spawned seed sequences, so they are
    independent of each other and of the parent.
    """

    def __init__(self, seed=0, _seq=None):
        self._seq = _seq if _seq is not None else np.random.SeedSequence(seed)
        self.seed = seed
        self.generator = np.random.Generator(np.random.Philox(self._seq))

    def split(self, count):
        return [RandomStream(self.seed, _seq=s) for s in self._seq.spawn(count)]


@dataclass
class SampleBatch:
    """Accepted states (rows of ``states``) plus proposal bookkeeping."""
    dim: int
    states: np.ndarray
    proposed: int
    source: str

    @property
    def accepted(self):
        return self.states.shape[0]

    @property
    def acceptance_rate(self):
        return self.accepted / self.proposed if self.proposed else float('nan')


def sample_haar(n, stream, size=None):
    """Unitary-invariant random pure state(s) of dimension ``n``.

    Returns a vector, or a ``(size, n)`` array when ``size`` is given.
    """
    shape = (1 if size is None else int(size), int(n))
    g = stream.generator.standard_normal(shape + (2,))
    z = g[..., 0] + 1j * g[..., 1]
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z[0] if size is None else z


def ensemble_source(ens):
    """Gauge-independent descriptor of a lazy ensemble."""
    b = ens.temperature - np.trace(ens.temperature).real / ens.dim * np.eye(ens.dim)
    key = np.round(b, 9) + 0.0  # normalises -0.0
    return 'lazy:' + hashlib.sha1(key.tobytes()).hexdigest()[:16]


def predicted_acceptance(ens):
    """Expected acceptance rate ``Z(b - b_min)`` of :func:`sample_lazy`."""
    return float(np.exp(log_partition(ens.nodes - ens.nodes.min())))


def sample_lazy(ens, count, stream, max_spread=MAX_SPREAD):
    """Draw ``count`` exact samples from a lazy ensemble by rejection.

    Raises
    ------
    SpreadTooLarge
        When ``b_max - b_min`` exceeds ``max_spread`` (acceptance would fall
        below ``exp(-max_spread)``).
    """
    count = int(count)
    if count < 1:
        raise ValueError('count must be positive')
    lo = ens.nodes.min()
    spread = ens.nodes.max() - lo
    if spread > max_spread:
        raise SpreadTooLarge('temperature spread %.3g exceeds %.3g' % (spread, max_spread))
    rate = predicted_acceptance(ens)
    chunk = int(min(max(1024, 1.2 * count / rate), 1 << 20))
    shifted = ens.temperature - lo * np.eye(ens.dim)
    kept, proposed, have = [], 0, 0
    while have < count:
        psi = sample_haar(ens.dim, stream, chunk)
        u = stream.generator.random(chunk)
        ok = np.flatnonzero(u < np.exp(-expectation(shifted, psi)))
        need = count - have
        if ok.size >= need:
            ok = ok[:need]
            proposed += int(ok[-1]) + 1
        else:
            proposed += chunk
        kept.append(psi[ok])
        have += ok.size
    return SampleBatch(ens.dim, np.concatenate(kept), proposed, ensemble_source(ens))


def merge_batches(*batches):
    """Concatenate batches drawn from the same source."""
    if not batches:
        raise EmptyBatch('nothing to merge')
    src = {b.source for b in batches}
    if len(src) != 1:
        raise SourceMismatch('cannot merge batches from %s' % sorted(src))
    return SampleBatch(batches[0].dim, np.concatenate([b.states for b in batches]),
                       sum(b.proposed for b in batches), batches[0].source)


def empirical_density_matrix(batch):
    """Average projector over the batch, as a validated density matrix."""
    if batch.accepted == 0:
        raise EmptyBatch('empty batch')
    s = batch.states
    rho = s.T @ s.conj() / s.shape[0]
    rho = 0.5 * (rho + rho.conj().T)
    return validate_density(rho / np.trace(rho).real)


def estimate_entropy(batch, ens):
    """Monte Carlo differential entropy: mean and standard error of ``ln mu``."""
    if batch.accepted == 0:
        raise EmptyBatch('empty batch')
    if batch.source != ensemble_source(ens):
        raise SourceMismatch('batch source %s does not match the ensemble' % batch.source)
    logs = log_density(ens, batch.states)
    if batch.accepted == 1:
        return float(logs[0]), float('inf')
    return float(logs.mean()), float(logs.std(ddof=1) / np.sqrt(logs.size))
