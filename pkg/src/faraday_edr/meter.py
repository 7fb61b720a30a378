"""Two-mode polarization meter: truncated Fock basis, Stokes operators, states.

The basis is truncated by TOTAL photon number.  All four Stokes operators
commute with the total photon number, so that truncation closes their
commutation algebra: there is no leakage at the boundary, and the only
residual in [Sx,Sy] - 2i Sz etc. is floating-point rounding (exactly zero
at cutoff 1, below 1e-12 at any tested cutoff).  Per-mode truncation would
not have this property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CutoffCeilingError, DimensionMismatchError, NormDeficitError
from .linalg import Ket, Operator, hermitian_function
from .tolerances import TOL


@dataclass(frozen=True, eq=False)
class MeterBasis:
    """Fock states (n_H, n_V) with n_H + n_V <= n_max.

    Enumeration is lexicographic by (n_H + n_V, n_H), so states of equal
    total photon number are contiguous blocks.
    """

    n_max: int
    states: tuple = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        states = tuple((nh, n - nh) for n in range(self.n_max + 1) for nh in range(n + 1))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(states)})

    def __eq__(self, other) -> bool:
        return isinstance(other, MeterBasis) and other.n_max == self.n_max

    def __hash__(self) -> int:
        return hash(("MeterBasis", self.n_max))

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def tag(self) -> str:
        return f"meter({self.n_max})"

    @property
    def joint_tag(self) -> str:
        return f"joint({self.n_max})"

    def index_of(self, nh: int, nv: int) -> int:
        return self._index[(nh, nv)]

    def block_slice(self, n: int) -> slice:
        """Indices of the total-photon-number-n block."""
        start = n * (n + 1) // 2
        return slice(start, start + n + 1)

    def totals(self) -> np.ndarray:
        return np.array([nh + nv for nh, nv in self.states], dtype=float)


@dataclass(frozen=True)
class StokesSet:
    """The four Stokes operators on a truncated two-mode basis."""

    basis: MeterBasis
    s0: Operator
    sx: Operator
    sy: Operator
    sz: Operator


@dataclass(frozen=True)
class SqueezeSpec:
    """Two-mode squeezing z = r e^{i theta}.

    theta=None selects the amplitude-squeezing phase convention
    theta = 2*arg(alpha) automatically during state preparation (for the
    default real positive alpha this is theta = 0).  An explicit theta
    must match that convention or preparation refuses.
    """

    r: float
    theta: float | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.r):
            raise ValueError("squeeze magnitude r must be finite")
        if self.theta is not None and not math.isfinite(self.theta):
            raise ValueError("squeeze phase theta must be finite")


def ladder_h(basis: MeterBasis) -> Operator:
    """Annihilation operator of the H mode, confined to the truncated basis."""
    m = np.zeros((basis.size, basis.size), dtype=np.complex128)
    for i, (nh, nv) in enumerate(basis.states):
        if nh >= 1:
            m[basis.index_of(nh - 1, nv), i] = np.sqrt(nh)
    return Operator(m, basis.tag)


def ladder_v(basis: MeterBasis) -> Operator:
    m = np.zeros((basis.size, basis.size), dtype=np.complex128)
    for i, (nh, nv) in enumerate(basis.states):
        if nv >= 1:
            m[basis.index_of(nh, nv - 1), i] = np.sqrt(nv)
    return Operator(m, basis.tag)


def build_stokes(basis: MeterBasis) -> StokesSet:
    """S0 = nH+nV, Sx = nH-nV, Sy = aH^t aV + aH aV^t, Sz = -i(aH^t aV - aH aV^t).

    Matrix elements are written directly from the ladder actions; both
    ladder hops conserve the total photon number, so every target state is
    inside the basis.  (tests cross-check against explicit ladder-matrix
    products.)
    """
    size = basis.size
    s0 = np.zeros((size, size), dtype=np.complex128)
    sx = np.zeros((size, size), dtype=np.complex128)
    sy = np.zeros((size, size), dtype=np.complex128)
    sz = np.zeros((size, size), dtype=np.complex128)
    for i, (nh, nv) in enumerate(basis.states):
        s0[i, i] = nh + nv
        sx[i, i] = nh - nv
        if nv >= 1:  # aH^t aV
            j = basis.index_of(nh + 1, nv - 1)
            amp = np.sqrt((nh + 1) * nv)
            sy[j, i] += amp
            sz[j, i] += -1j * amp
        if nh >= 1:  # aH aV^t
            j = basis.index_of(nh - 1, nv + 1)
            amp = np.sqrt(nh * (nv + 1))
            sy[j, i] += amp
            sz[j, i] += 1j * amp
    tag = basis.tag
    return StokesSet(
        basis=basis,
        s0=Operator(s0, tag, hermitian=True),
        sx=Operator(sx, tag, hermitian=True),
        sy=Operator(sy, tag, hermitian=True),
        sz=Operator(sz, tag, hermitian=True),
    )


@dataclass(frozen=True)
class SzEigensystem:
    """Spectral decomposition of Sz, computed block-by-block.

    Sz conserves the total photon number, so it is block tridiagonal in
    this enumeration; each total-n block diagonalizes independently.  The
    spectrum is the integers n_L - n_R of the circular modes.
    """

    basis: MeterBasis
    values: np.ndarray
    vectors: np.ndarray


def sz_eigensystem(basis: MeterBasis) -> SzEigensystem:
    size = basis.size
    values = np.zeros(size)
    vectors = np.zeros((size, size), dtype=np.complex128)
    for n in range(basis.n_max + 1):
        d = n + 1
        blk = np.zeros((d, d), dtype=np.complex128)
        for k in range(n):  # couples (k, n-k) <-> (k+1, n-k-1)
            amp = np.sqrt((k + 1) * (n - k))
            blk[k + 1, k] = -1j * amp
            blk[k, k + 1] = 1j * amp
        w, v = np.linalg.eigh(blk)
        sl = basis.block_slice(n)
        values[sl] = w
        vectors[sl, sl] = v
    values.flags.writeable = False
    vectors.flags.writeable = False
    return SzEigensystem(basis=basis, values=values, vectors=vectors)


# ---------------------------------------------------------------------------
# state preparation


def _single_mode_ladder(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(np.complex128)


def _exp_antihermitian(gen: np.ndarray, tag: str) -> np.ndarray:
    """exp(G) for anti-Hermitian G, via hermitian_function of K = iG."""
    k = Operator(1j * gen, tag)
    return hermitian_function(k, lambda lam: np.exp(-1j * lam)).matrix


def _displaced_squeezed_mode(alpha: complex, z: complex, dim: int) -> np.ndarray:
    """Single-mode amplitudes of D(alpha) S(z) |0> on a dim-level Fock space."""
    a = _single_mode_ladder(dim)
    ad = a.conj().T
    tag = f"fock({dim - 1})"
    psi = np.zeros(dim, dtype=np.complex128)
    psi[0] = 1.0
    if z != 0:
        gen_s = 0.5 * (np.conj(z) * (a @ a) - z * (ad @ ad))
        psi = _exp_antihermitian(gen_s, tag) @ psi
    if alpha != 0:
        gen_d = alpha * ad - np.conj(alpha) * a
        psi = _exp_antihermitian(gen_d, tag) @ psi
    return psi


def _working_dim(n_max: int) -> int:
    # +40% padding, min +10: squeeze/displace do not conserve photon number,
    # so they are exponentiated in a larger space before projecting back.
    return n_max + max(10, math.ceil(0.4 * n_max)) + 1


def _squeeze_phase(alpha: complex, squeeze: SqueezeSpec) -> float:
    """Enforce the amplitude-squeezing convention arg(alpha) - theta/2 = 0."""
    if alpha == 0:
        return squeeze.theta if squeeze.theta is not None else 0.0
    want = 2.0 * float(np.angle(alpha))
    if squeeze.theta is None:
        return want
    gap = (squeeze.theta - want + math.pi) % (2.0 * math.pi) - math.pi
    if abs(gap) > 1e-9:
        raise ValueError(
            f"squeeze phase theta={squeeze.theta} violates the amplitude-squeezing "
            f"convention theta = 2*arg(alpha) = {want}"
        )
    return squeeze.theta


def _mode_amplitudes(alpha: complex, squeeze: SqueezeSpec | None,
                     n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """(H-mode, V-mode) single-mode amplitudes, prepared in a padded space."""
    dim = _working_dim(n_max)
    if squeeze is None or squeeze.r == 0.0:
        z = 0.0
    else:
        z = squeeze.r * np.exp(1j * _squeeze_phase(alpha, squeeze))
    psi_h = _displaced_squeezed_mode(alpha, z, dim)
    psi_v = _displaced_squeezed_mode(0.0, z, dim)
    return psi_h, psi_v


def _combine_modes(psi_h: np.ndarray, psi_v: np.ndarray, basis: MeterBasis) -> np.ndarray:
    amps = np.empty(basis.size, dtype=np.complex128)
    for i, (nh, nv) in enumerate(basis.states):
        amps[i] = psi_h[nh] * psi_v[nv]
    return amps


def coherent_state(alpha: complex, basis: MeterBasis, tail_tol: float = TOL.tail) -> Ket:
    """|alpha>_H |0>_V with exact per-entry amplitudes; not renormalized.

    Raises NormDeficitError when the basis cutoff drops more than tail_tol
    of probability mass.
    """
    amps = np.zeros(basis.size, dtype=np.complex128)
    c = np.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(basis.n_max + 1):
        amps[basis.index_of(n, 0)] = c
        c = c * alpha / np.sqrt(n + 1.0)
    ket = Ket(amps, basis.tag)
    if ket.norm_deficit > tail_tol:
        raise NormDeficitError(
            f"coherent state |alpha|^2={abs(alpha)**2:.6g} at cutoff {basis.n_max} "
            f"has norm deficit {ket.norm_deficit:.3e} > tail_tol {tail_tol:.1e}"
        )
    return ket


def squeezed_coherent_state(alpha: complex, squeeze: SqueezeSpec, basis: MeterBasis,
                            tail_tol: float = TOL.tail) -> Ket:
    """D(alpha) S(z) |0>_H |0>_V truncated to the analysis basis.

    The two-mode squeezer in the circular modes factorizes into identical
    single-mode squeezers on H and V, so each mode is prepared by
    exponentiating its generators (via hermitian_function) in a padded
    working space and the product is projected onto n_H + n_V <= n_max.
    The projection loss is the reported norm deficit.
    """
    psi_h, psi_v = _mode_amplitudes(alpha, squeeze, basis.n_max)
    ket = Ket(_combine_modes(psi_h, psi_v, basis), basis.tag)
    if ket.norm_deficit > tail_tol:
        raise NormDeficitError(
            f"squeezed state |alpha|^2={abs(alpha)**2:.6g}, r={squeeze.r} at cutoff "
            f"{basis.n_max} has norm deficit {ket.norm_deficit:.3e} > tail_tol {tail_tol:.1e}"
        )
    return ket


def prepare_meter_state(alpha: complex, squeeze: SqueezeSpec | None, basis: MeterBasis,
                        tail_tol: float = TOL.tail) -> Ket:
    if squeeze is None:
        return coherent_state(alpha, basis, tail_tol)
    return squeezed_coherent_state(alpha, squeeze, basis, tail_tol)


def choose_cutoff(alpha2: float, r: float = 0.0, tail_tol: float = TOL.tail,
                  ceiling: int = TOL.cutoff_ceiling) -> int:
    """Smallest n_max whose prepared-state norm deficit is within tail_tol.

    The photon-number mass profile is computed once at a generous scan
    cutoff (starting from ceil(alpha2 + 8*sqrt(alpha2+1)), grown if that
    is still lossy), then the smallest adequate n_max is read off the
    cumulative mass.  The result can sit well below the scan start: a
    vacuum meter needs no photons at all.
    """
    if alpha2 < 0:
        raise ValueError("alpha2 must be non-negative")
    if not 0.0 < tail_tol <= 1e-6:
        raise ValueError("tail_tol must lie in (0, 1e-6]")
    alpha = math.sqrt(alpha2)
    squeeze = SqueezeSpec(r) if r != 0.0 else None

    scan = max(0, math.ceil(alpha2 + 8.0 * math.sqrt(alpha2 + 1.0)))
    scan = min(scan, ceiling)
    while True:
        psi_h, psi_v = _mode_amplitudes(alpha, squeeze, scan)
        # mass per total photon number n, summed over the (nh, n-nh) splits
        ph2 = np.abs(psi_h[: scan + 1]) ** 2
        pv2 = np.abs(psi_v[: scan + 1]) ** 2
        mass = np.array([np.dot(ph2[: n + 1], pv2[: n + 1][::-1]) for n in range(scan + 1)])
        deficit = 1.0 - np.cumsum(mass)
        if deficit[-1] <= tail_tol:
            break
        if scan >= ceiling:
            raise CutoffCeilingError(
                f"norm deficit {deficit[-1]:.3e} still exceeds {tail_tol:.1e} at the "
                f"cutoff ceiling {ceiling}"
            )
        scan = min(math.ceil(scan * 1.5) + 10, ceiling)

    n_star = int(np.argmax(deficit <= tail_tol))
    # confirm against an actual preparation at the candidate cutoff
    while n_star <= ceiling:
        try:
            prepare_meter_state(alpha, squeeze, MeterBasis(n_star), tail_tol)
            return n_star
        except NormDeficitError:
            n_star += 1
    raise CutoffCeilingError(f"no adequate cutoff below the ceiling {ceiling}")


# ---------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class StokesMoments:
    """Means and variances of the Stokes operators on a prepared state.

    Expectations are corrected for truncation by dividing out <psi|psi>;
    the raw deficit is carried along for traceability.
    """

    mean_s0: float
    var_s0: float
    mean_sx: float
    var_sx: float
    mean_sy: float
    var_sy: float
    mean_sz: float
    var_sz: float
    norm_deficit: float


def _mean_var(op: Operator, amps: np.ndarray, n2: float) -> tuple[float, float]:
    w = op.matrix @ amps
    mean = float(np.vdot(amps, w).real) / n2
    var = float(np.vdot(w, w).real) / n2 - mean * mean
    return mean, var


def stokes_moments(state: Ket, stokes: StokesSet) -> StokesMoments:
    if state.basis_tag != stokes.basis.tag:
        raise DimensionMismatchError(
            f"state/stokes basis mismatch: {state.basis_tag!r} vs {stokes.basis.tag!r}"
        )
    amps = state.amplitudes
    n2 = float(np.vdot(amps, amps).real)
    m0, v0 = _mean_var(stokes.s0, amps, n2)
    mx, vx = _mean_var(stokes.sx, amps, n2)
    my, vy = _mean_var(stokes.sy, amps, n2)
    mz, vz = _mean_var(stokes.sz, amps, n2)
    return StokesMoments(m0, v0, mx, vx, my, vy, mz, vz, state.norm_deficit)


def predicted_moments(alpha2: float, r: float) -> StokesMoments:
    """Analytic moments of the squeezed coherent meter state.

    <S0> = |a|^2 + 2 sinh^2 r, <Sx> = |a|^2, <Sy> = <Sz> = 0,
    var S0 = var Sx = var Sy = |a|^2 e^{-2r} + sinh^2(2r),
    var Sz = |a|^2 e^{2r}.

    The sinh^2(2r) term in the Sy variance is the full (not half) one: the
    per-mode photon-number variances carry sinh^2(2r)/2 each, and the
    ladder cross terms of Sy contribute the same amount again.  Both
    statements hold exactly and are verified numerically in the tests.
    r = 0 reduces everything to the Poissonian coherent values.
    """
    s2 = math.sinh(r) ** 2
    v_perp = alpha2 * math.exp(-2.0 * r) + math.sinh(2.0 * r) ** 2
    return StokesMoments(
        mean_s0=alpha2 + 2.0 * s2,
        var_s0=v_perp,
        mean_sx=alpha2,
        var_sx=v_perp,
        mean_sy=0.0,
        var_sy=v_perp,
        mean_sz=0.0,
        var_sz=alpha2 * math.exp(2.0 * r),
        norm_deficit=0.0,
    )
