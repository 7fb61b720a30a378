"""Central tolerance record.

Every numerical threshold used by the package (and cited by the tests and
the README) lives here, so there is exactly one place to audit.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    #: max|M - M^dag| allowed when an operator is declared Hermitian
    hermiticity: float = 1e-12
    #: max|U^dag U - I| allowed for constructed unitaries
    unitarity: float = 1e-11
    #: relative tolerance for numeric-vs-analytic oracle comparisons
    oracle_rel: float = 1e-9
    #: max-entry tolerance for spectral evolution vs closed-form operators
    bch_max_entry: float = 1e-10
    #: absolute tolerance on |<N>| for the unbiasedness checks
    unbiasedness: float = 1e-10
    #: default truncation budget: 1 - ||state||^2 of a prepared meter state
    tail: float = 1e-12
    #: |sin 2g| below this raises the calibration-singularity error
    sin2g_min: float = 1e-9
    #: |<Sx>| below this raises the zero-mean-Sx error
    mean_sx_min: float = 1e-9
    #: symmetric band around 1 for uncertainty-bound violation flags
    bounds_band: float = 1e-9
    #: hard ceiling on the total-photon-number cutoff
    cutoff_ceiling: int = 200


TOL = Tolerances()
