"""Sudden quenches h_i -> h_f: initial states, work statistics and survival probability.

Energies are in the units of the bosonic Hamiltonian and time in inverse
energy units (hbar = 1).
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eig_banded
from scipy.signal import find_peaks

from .model import ModelParams, Parity, build_hamiltonian, build_sx
from .spectral import DEFAULT_DEGENERACY_THRESHOLD, EigenDecomposition, diagonalize

__all__ = [
    "DEFAULT_MERGE_TOL",
    "InitialStateSpec",
    "ModeReport",
    "PreparedState",
    "QuenchResult",
    "StateKind",
    "SurvivalSeries",
    "WorkDistribution",
    "characteristic_function",
    "default_time_grid",
    "diagonal_entropy",
    "find_modes",
    "prepare_initial",
    "quench_state",
    "revival_period",
    "run_quench",
    "survival_ceiling",
    "survival_probability",
    "transition_probabilities",
    "work_distribution",
    "work_moments",
]

DEFAULT_MERGE_TOL = 1e-9
PROBABILITY_FLOOR = 1e-14
_NORM_TOL = 1e-12


class StateKind(str, enum.Enum):
    SYMMETRIC_GROUND = "sym"
    SYMMETRIC_EXCITED = "sym-excited"
    FSB_PLUS = "fsb+"
    FSB_MINUS = "fsb-"
    SUPERPOSITION = "sup"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class InitialStateSpec:
    """Which pre-quench state to prepare.

    ``level`` and ``parity`` select the ``level``-th eigenstate (0 = lowest) of a
    parity sector for the symmetric kinds. ``coefficients`` are the amplitudes
    on the lowest PLUS and MINUS sector states for ``SUPERPOSITION``. A non-zero
    ``bias`` switches the FSB kinds to the ground state of the biased
    Hamiltonian instead of the doublet superposition.
    """

    kind: StateKind = StateKind.SYMMETRIC_GROUND
    level: int = 0
    parity: Parity = Parity.PLUS
    coefficients: tuple[complex, complex] = (1.0, 0.0)
    vector: np.ndarray | None = field(default=None, compare=False, repr=False)
    bias: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", StateKind(self.kind))
        object.__setattr__(self, "parity", Parity(self.parity))
        if self.level < 0:
            raise ValueError(f"level must be >= 0, got {self.level}")
        if self.kind is StateKind.SUPERPOSITION:
            cp, cm = (complex(c) for c in self.coefficients)
            if abs(abs(cp) ** 2 + abs(cm) ** 2 - 1) > _NORM_TOL:
                raise ValueError("superposition coefficients must satisfy |c+|^2 + |c-|^2 = 1")
            object.__setattr__(self, "coefficients", (cp, cm))
        if self.kind is StateKind.EXPLICIT:
            if self.vector is None:
                raise ValueError("explicit state needs a vector")
            v = np.array(self.vector)
            if v.ndim != 1 or abs(np.vdot(v, v).real - 1) > _NORM_TOL:
                raise ValueError("explicit state vector must be 1-D and normalized")
            v.setflags(write=False)
            object.__setattr__(self, "vector", v)

    @classmethod
    def symmetric_ground(cls) -> "InitialStateSpec":
        return cls(StateKind.SYMMETRIC_GROUND)

    @classmethod
    def excited(cls, level: int, parity: Parity = Parity.PLUS) -> "InitialStateSpec":
        return cls(StateKind.SYMMETRIC_EXCITED, level=level, parity=parity)

    @classmethod
    def fsb(cls, sign: int = 1, bias: float = 0.0) -> "InitialStateSpec":
        return cls(StateKind.FSB_PLUS if sign > 0 else StateKind.FSB_MINUS, bias=bias)

    @classmethod
    def superposition(cls, c_plus: complex, c_minus: complex) -> "InitialStateSpec":
        return cls(StateKind.SUPERPOSITION, coefficients=(c_plus, c_minus))

    @classmethod
    def explicit(cls, vector) -> "InitialStateSpec":
        return cls(StateKind.EXPLICIT, vector=vector)

    @classmethod
    def parse(cls, label: str) -> "InitialStateSpec":
        """Parse ``sym``, ``sym-excited:k``, ``fsb+``, ``fsb-`` or ``sup:cp,cm``.

        Superposition amplitudes are normalized here, so ``sup:2,1`` is accepted.
        """
        label = label.strip()
        head, _, arg = label.partition(":")
        if head == "sym" and not arg:
            return cls.symmetric_ground()
        if head == "sym-excited":
            try:
                level = int(arg)
            except ValueError:
                raise ValueError(f"bad excited level in {label!r}") from None
            return cls.excited(level)
        if head in ("fsb+", "fsb-") and not arg:
            return cls.fsb(1 if head == "fsb+" else -1)
        if head == "sup":
            try:
                cp, cm = (complex(x.replace(" ", "")) for x in arg.split(","))
            except ValueError:
                raise ValueError(f"bad superposition coefficients in {label!r}") from None
            norm = math.sqrt(abs(cp) ** 2 + abs(cm) ** 2)
            if norm == 0:
                raise ValueError("superposition coefficients are both zero")
            return cls.superposition(cp / norm, cm / norm)
        raise ValueError(f"unknown state label {label!r}")

    @property
    def label(self) -> str:
        if self.kind is StateKind.SYMMETRIC_EXCITED:
            return f"sym-excited:{self.level}"
        if self.kind is StateKind.SUPERPOSITION:
            return "sup:" + ",".join(_fmt_complex(c) for c in self.coefficients)
        return self.kind.value


def _fmt_complex(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:.17g}"
    return f"{c.real:.17g}{c.imag:+.17g}j"


@dataclass(frozen=True)
class PreparedState:
    """Normalized pre-quench state and the energy E_n that work is measured from."""

    vector: np.ndarray
    reference_energy: float
    spec: InitialStateSpec
    params: ModelParams


def _fix_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return v if v[i] >= 0 else -v


def _ground_doublet(params: ModelParams, threshold: float):
    if params.field >= 1:
        raise ValueError(
            f"symmetry-broken states need a degenerate ground doublet (h_i < 1), got h_i={params.field}"
        )
    H = build_hamiltonian(params.with_field(params.field, 0.0))
    plus = diagonalize(H, Parity.PLUS)
    minus = diagonalize(H, Parity.MINUS)
    phi_p = _fix_sign(plus.vectors[:, 0].copy())
    phi_m = minus.vectors[:, 0].copy()
    sx = build_sx(params)
    if phi_p @ sx.matvec(phi_m) < 0:
        phi_m = -phi_m
    e_p, e_m = float(plus.values[0]), float(minus.values[0])
    if abs(e_p - e_m) > threshold:
        warnings.warn(
            f"ground doublet splitting {abs(e_p - e_m):.3e} exceeds {threshold:g}; "
            "the symmetry-broken state is not stationary",
            stacklevel=3,
        )
    return phi_p, phi_m, (e_p + e_m) / 2


def prepare_initial(
    params_i: ModelParams,
    spec: InitialStateSpec,
    degeneracy_threshold: float = DEFAULT_DEGENERACY_THRESHOLD,
) -> PreparedState:
    """Build the pre-quench state at field ``params_i.field``.

    The lowest PLUS and MINUS sector states are sign-fixed so that the FSB+
    combination has ``<S_x> > 0``. For superposed kinds the reference energy is
    the doublet mean.
    """
    kind = spec.kind
    if kind in (StateKind.SYMMETRIC_GROUND, StateKind.SYMMETRIC_EXCITED):
        H = build_hamiltonian(params_i)
        if H.has_odd_couplings:
            eig = diagonalize(H)
            if spec.level >= eig.dim:
                raise ValueError(f"level {spec.level} outside spectrum of size {eig.dim}")
            vec, energy = eig.vectors[:, spec.level], eig.values[spec.level]
        else:
            eig = diagonalize(H, spec.parity)
            if spec.level >= eig.dim:
                raise ValueError(
                    f"level {spec.level} outside sector of dimension {eig.dim}"
                )
            vec, energy = eig.vectors[:, spec.level], eig.values[spec.level]
        vec = _fix_sign(vec.copy())
    elif kind in (StateKind.FSB_PLUS, StateKind.FSB_MINUS) and spec.bias != 0:
        if params_i.field >= 1:
            raise ValueError(f"symmetry-broken states need h_i < 1, got {params_i.field}")
        sign = 1 if kind is StateKind.FSB_PLUS else -1
        # +bias*S_x favours S_x < 0, so flip the sign to land on the requested branch
        H = build_hamiltonian(params_i.with_field(params_i.field, -sign * abs(spec.bias)))
        w, v = eig_banded(H.lower_banded(), lower=True, select="i", select_range=(0, 0))
        vec, energy = _fix_sign(v[:, 0].copy()), float(w[0])
    elif kind in (StateKind.FSB_PLUS, StateKind.FSB_MINUS, StateKind.SUPERPOSITION):
        phi_p, phi_m, energy = _ground_doublet(params_i, degeneracy_threshold)
        if kind is StateKind.SUPERPOSITION:
            cp, cm = spec.coefficients
        else:
            cp = 1 / math.sqrt(2)
            cm = cp if kind is StateKind.FSB_PLUS else -cp
        vec = cp * phi_p + cm * phi_m
        if np.iscomplexobj(vec) and not np.any(vec.imag):
            vec = vec.real
    else:
        vec = np.array(spec.vector)
        if vec.size != params_i.dim:
            raise ValueError(f"explicit vector has length {vec.size}, expected {params_i.dim}")
        energy = build_hamiltonian(params_i).expectation(vec)
    vec = np.asarray(vec)
    vec.setflags(write=False)
    return PreparedState(vec, float(energy), spec, params_i)


def transition_probabilities(state, eig_f: EigenDecomposition) -> np.ndarray:
    """``|<m_f|psi>|^2`` for every final eigenstate ``m``."""
    psi = state.vector if isinstance(state, PreparedState) else np.asarray(state)
    if psi.shape != (eig_f.dim,):
        raise ValueError(f"state has shape {psi.shape}, expected ({eig_f.dim},)")
    amp = eig_f.vectors.T @ psi
    return np.abs(amp) ** 2


@dataclass(frozen=True)
class WorkDistribution:
    """Merged work outcomes ``W_m = E_m - E_n`` with their probabilities."""

    work: np.ndarray
    probabilities: np.ndarray
    reference_energy: float
    merge_tol: float

    def __len__(self):
        return self.work.size

    @property
    def energies(self) -> np.ndarray:
        """Final-Hamiltonian energies of the outcomes."""
        return self.work + self.reference_energy

    @property
    def peak_probability(self) -> float:
        return float(self.probabilities.max())

    def support(self, floor: float = PROBABILITY_FLOOR) -> np.ndarray:
        """Mask of outcomes carrying probability of at least ``floor``."""
        return self.probabilities >= floor


def work_distribution(p, energies, reference_energy: float, merge_tol: float = DEFAULT_MERGE_TOL):
    """Collect ``p`` onto outcomes ``W = E - E_n``, summing levels closer than ``merge_tol``.

    Runs of consecutive sorted energies with gaps ``<= merge_tol`` form one
    outcome located at their probability-weighted mean work.
    """
    p = np.asarray(p, dtype=float)
    energies = np.asarray(energies, dtype=float)
    if p.shape != energies.shape or p.ndim != 1 or p.size == 0:
        raise ValueError("p and energies must be non-empty 1-D arrays of equal length")
    if np.any(p < 0) or not np.isfinite(p).all():
        raise ValueError("probabilities must be finite and non-negative")
    if merge_tol < 0:
        raise ValueError("merge_tol must be >= 0")
    order = np.argsort(energies, kind="stable")
    w = energies[order] - reference_energy
    p = p[order]
    starts = np.flatnonzero(np.concatenate(([True], np.diff(w) > merge_tol)))
    psum = np.add.reduceat(p, starts)
    count = np.diff(np.append(starts, w.size))
    pw = np.add.reduceat(p * w, starts)
    plain = np.add.reduceat(w, starts) / count
    with np.errstate(invalid="ignore", divide="ignore"):
        centre = np.where(psum > 0, pw / np.where(psum > 0, psum, 1.0), plain)
    # a single-member group keeps its exact energy
    centre = np.where(count == 1, w[starts], centre)
    for a in (centre, psum):
        a.setflags(write=False)
    return WorkDistribution(centre, psum, float(reference_energy), float(merge_tol))


def work_moments(dist: WorkDistribution, order: int) -> float:
    """``sum_m p_m W_m^order``."""
    if int(order) != order or order < 1:
        raise ValueError(f"order must be a positive integer, got {order}")
    return float(np.sum(dist.probabilities * dist.work ** int(order)))


def characteristic_function(dist: WorkDistribution, times) -> np.ndarray:
    """``G(t) = sum_m p_m exp(i W_m t)``; ``(-i)^l d^l G/dt^l`` at 0 gives the moments."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    out = np.empty(t.size, dtype=complex)
    for s in range(0, t.size, 256):
        out[s : s + 256] = np.exp(1j * np.outer(t[s : s + 256], dist.work)) @ dist.probabilities
    return out


@dataclass(frozen=True)
class SurvivalSeries:
    times: np.ndarray
    values: np.ndarray


def survival_probability(dist: WorkDistribution, times) -> SurvivalSeries:
    """``L(t) = |<psi(0)|exp(-i H_f t)|psi(0)>|^2 = |G(t)|^2``."""
    t = np.asarray(times, dtype=float)
    values = np.abs(characteristic_function(dist, t)) ** 2
    return SurvivalSeries(t, values)


def typical_spacing(dist: WorkDistribution, rel_floor: float = 0.01) -> float:
    """Mean gap between outcomes holding at least ``rel_floor`` of the top probability."""
    w = dist.work[dist.probabilities >= rel_floor * dist.peak_probability]
    if w.size < 2:
        return 1.0
    return float(np.diff(w).mean())


def default_time_grid(dist: WorkDistribution, n_points: int = 2048, n_periods: float = 20) -> np.ndarray:
    """``n_points`` samples over ``[0, n_periods * 2 pi / dE]`` with dE from :func:`typical_spacing`."""
    return np.linspace(0.0, n_periods * 2 * math.pi / typical_spacing(dist), n_points)


def diagonal_entropy(dist: WorkDistribution) -> float:
    """Base-2 Shannon entropy of the merged outcomes (``p < 1e-14`` ignored)."""
    p = dist.probabilities[dist.probabilities >= PROBABILITY_FLOOR]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def revival_period(series: SurvivalSeries, prominence: float = 0.1) -> float:
    """Median spacing of survival peaks with at least the given prominence."""
    peaks, _ = find_peaks(series.values, prominence=prominence)
    if peaks.size < 2:
        raise ValueError(f"found {peaks.size} revival peak(s); need at least 2")
    return float(np.median(np.diff(series.times[peaks])))


def survival_ceiling(series: SurvivalSeries) -> float:
    """Largest survival probability after the first local minimum (initial decay)."""
    v = series.values
    d = np.diff(v)
    falling = np.flatnonzero(d < 0)
    if falling.size == 0:
        return float(v.max())
    rising = np.flatnonzero(d[falling[0] :] > 0)
    if rising.size == 0:
        return float(v[-1])
    return float(v[falling[0] + rising[0] :].max())


@dataclass(frozen=True)
class ModeReport:
    """Local maxima of a smoothed work distribution and the deepest dip between them.

    Indices refer to the support arrays ``work`` and ``probabilities``.
    ``dip_depth`` is ``1 - p_dip / min(p_left_peak, p_right_peak)`` evaluated on
    the unsmoothed distribution, maximized over adjacent peak pairs (0 when
    there are fewer than two peaks).
    """

    work: np.ndarray
    probabilities: np.ndarray
    smoothed: np.ndarray
    peaks: np.ndarray
    dip_depth: float
    dip_work: float | None

    @property
    def n_peaks(self) -> int:
        return int(self.peaks.size)


def find_modes(dist: WorkDistribution, window: int = 5, floor: float = PROBABILITY_FLOOR) -> ModeReport:
    """Count modes of P_W after a ``window``-outcome moving average.

    Outcomes below ``floor`` (for instance the empty partners of doublets for a
    parity-symmetric initial state) are dropped first.
    """
    keep = dist.support(floor)
    w, p = dist.work[keep], dist.probabilities[keep]
    smooth = np.convolve(p, np.ones(window) / window, mode="same")
    peaks, _ = find_peaks(smooth)
    half = window // 2
    depth, dip_at = 0.0, None
    for a, b in zip(peaks[:-1], peaks[1:]):
        left = p[max(0, a - half) : a + half + 1].max()
        right = p[max(0, b - half) : b + half + 1].max()
        j = a + int(np.argmin(p[a : b + 1]))
        d = 1.0 - p[j] / min(left, right)
        if d > depth:
            depth, dip_at = float(d), float(w[j])
    return ModeReport(w, p, smooth, peaks, depth, dip_at)


@dataclass(frozen=True)
class QuenchResult:
    params_i: ModelParams
    params_f: ModelParams
    state_kind: str
    distribution: WorkDistribution
    moments: dict
    entropy: float
    survival: SurvivalSeries | None
    quenched_energy: float

    @property
    def reference_energy(self) -> float:
        return self.distribution.reference_energy

    def to_json(self) -> dict:
        d = self.distribution
        return {
            "params": {
                "n": self.params_i.n_spins,
                "hi": self.params_i.field,
                "hf": self.params_f.field,
                "eps": self.params_f.bias,
            },
            "state_kind": self.state_kind,
            "work": [{"W": float(w), "p": float(p)} for w, p in zip(d.work, d.probabilities)],
            "moments": dict(self.moments),
            "entropy": self.entropy,
            "quenched_energy": self.quenched_energy,
        }


def quench_state(
    state: PreparedState,
    params_f: ModelParams,
    times=None,
    merge_tol: float = DEFAULT_MERGE_TOL,
    survival: bool = True,
) -> QuenchResult:
    """Quench an already prepared state to the Hamiltonian ``params_f``.

    ``times=None`` uses :func:`default_time_grid`; ``survival=False`` skips L(t).
    """
    if params_f.n_spins != state.params.n_spins:
        raise ValueError("initial and final system sizes differ")
    H_f = build_hamiltonian(params_f)
    eig = diagonalize(H_f)
    p = transition_probabilities(state, eig)
    dist = work_distribution(p, eig.values, state.reference_energy, merge_tol)
    m1, m2 = work_moments(dist, 1), work_moments(dist, 2)
    series = None
    if survival:
        series = survival_probability(dist, default_time_grid(dist) if times is None else times)
    return QuenchResult(
        params_i=state.params,
        params_f=params_f,
        state_kind=state.spec.label,
        distribution=dist,
        moments={"m1": m1, "m2": m2, "var": m2 - m1 * m1},
        entropy=diagonal_entropy(dist),
        survival=series,
        quenched_energy=H_f.expectation(state.vector),
    )


def run_quench(
    n_spins: int,
    h_i: float,
    h_f: float,
    spec: InitialStateSpec | str = "sym",
    bias: float = 0.0,
    times=None,
    merge_tol: float = DEFAULT_MERGE_TOL,
    survival: bool = True,
) -> QuenchResult:
    """Prepare ``spec`` at ``h_i`` (no bias) and quench to ``h_f`` with ``bias``."""
    if isinstance(spec, str):
        spec = InitialStateSpec.parse(spec)
    state = prepare_initial(ModelParams(n_spins, h_i), spec)
    return quench_state(state, ModelParams(n_spins, h_f, bias), times, merge_tol, survival)
