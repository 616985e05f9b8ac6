"""Lazy ensembles: minimum differential entropy ensembles of pure states.

A lazy ensemble is the distribution ``exp(-<psi|B|psi>) / Z(B)`` over pure
states (relative to the unitary-invariant measure) whose average projector
equals a given density matrix.
"""
__version__ = '0.1.0'

from .errors import *  # noqa: F401,F403
from .spectra import (DensityMatrix, EigenDecomposition, as_hermitian,  # noqa: F401
                      as_pure_state, eigh, expectation, projector,
                      validate_density)
from .partition import (PartitionResult, differential_entropy,  # noqa: F401
                        divided_difference_exp, log_partition,
                        mean_occupations, occupation_jacobian, partition_summary,
                        partition_contour)
from .qubit import (qubit_delta, qubit_inverse_delta,  # noqa: F401
                    qubit_log_partition, qubit_partition)
from .inverse import (Gauge, LazyEnsemble, ensemble_density,  # noqa: F401
                      ensemble_from_temperature, fit_temperature, log_density,
                      regauge)
from .sampler import (RandomStream, SampleBatch, empirical_density_matrix,  # noqa: F401
                      estimate_entropy, predicted_acceptance, sample_haar,
                      sample_lazy)
from .conditional import (ConditionalEnsemble, Observable, compose,  # noqa: F401
                          conditional_mean, factorization_check,
                          fit_conditional, joint_fit)
