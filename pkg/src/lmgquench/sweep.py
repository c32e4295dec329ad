"""Batch quench scans over h_f grids and system sizes, and fits on the resulting table."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .model import ModelParams
from .quench import (
    DEFAULT_MERGE_TOL,
    InitialStateSpec,
    PreparedState,
    prepare_initial,
    quench_state,
    survival_ceiling,
)

__all__ = [
    "OBSERVABLES",
    "ScalingFit",
    "SweepError",
    "SweepPlan",
    "SweepRow",
    "compare_symmetry",
    "entropy_peak",
    "fit_entropy_scaling",
    "parse_grid",
    "run_sweep",
    "write_sweep_csv",
]

OBSERVABLES = ("entropy", "moments", "peak_probability", "survival_ceiling")
CSV_COLUMNS = ("N", "kind", "hf", "entropy", "m1", "m2", "var", "peak_p", "survival_ceiling")


class SweepError(RuntimeError):
    def __init__(self, n_spins: int, h_f: float, cause: BaseException):
        super().__init__(f"sweep cell N={n_spins}, hf={h_f:g} failed: {cause}")
        self.n_spins, self.h_f = n_spins, h_f


def parse_grid(text: str) -> np.ndarray:
    """``a:b:step`` -> values from a to b inclusive, rounded to the step's decimals."""
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ValueError(f"grid must look like a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise ValueError(f"grid needs step > 0 and b >= a, got {text!r}")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    decimals = max(0, -int(math.floor(math.log10(step))) + 6)
    return np.round(a + step * np.arange(n), decimals)


@dataclass(frozen=True)
class SweepPlan:
    h_i: float
    hf_grid: Sequence[float]
    sizes: Sequence[int]
    state_kinds: Sequence[InitialStateSpec | str] = ("sym",)
    epsilon: float = 0.0
    observables: Sequence[str] = ("entropy", "moments", "peak_probability")
    merge_tol: float = DEFAULT_MERGE_TOL

    def __post_init__(self):
        grid = np.asarray(self.hf_grid, dtype=float)
        sizes = [int(n) for n in self.sizes]
        if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ValueError("hf_grid must be non-empty and strictly ascending")
        if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sizes must be non-empty and strictly ascending")
        specs = tuple(
            InitialStateSpec.parse(k) if isinstance(k, str) else k for k in self.state_kinds
        )
        if not specs:
            raise ValueError("need at least one state kind")
        unknown = set(self.observables) - set(OBSERVABLES)
        if unknown:
            raise ValueError(f"unknown observables {sorted(unknown)}")
        object.__setattr__(self, "hf_grid", tuple(float(x) for x in grid))
        object.__setattr__(self, "sizes", tuple(sizes))
        object.__setattr__(self, "state_kinds", specs)
        object.__setattr__(self, "observables", tuple(self.observables))


@dataclass(frozen=True)
class SweepRow:
    N: int
    kind: str
    hf: float
    entropy: float = math.nan
    m1: float = math.nan
    m2: float = math.nan
    var: float = math.nan
    peak_p: float = math.nan
    survival_ceiling: float = math.nan


def _cell(args) -> SweepRow:
    state, h_f, eps, observables, merge_tol = args
    N = state.params.n_spins
    try:
        want_survival = "survival_ceiling" in observables
        res = quench_state(state, ModelParams(N, h_f, eps), merge_tol=merge_tol, survival=want_survival)
    except Exception as exc:
        raise SweepError(N, h_f, exc) from exc
    values = {}
    if "entropy" in observables:
        values["entropy"] = res.entropy
    if "moments" in observables:
        values.update(res.moments)
    if "peak_probability" in observables:
        values["peak_p"] = res.distribution.peak_probability
    if want_survival:
        values["survival_ceiling"] = survival_ceiling(res.survival)
    return SweepRow(N, state.spec.label, h_f, **values)


def run_sweep(plan: SweepPlan, n_jobs: int = 1) -> list[SweepRow]:
    """Evaluate every (N, kind, h_f) cell; rows ordered N, then kind, then h_f.

    The initial state is prepared once per (N, kind). ``n_jobs > 1`` farms the
    cells out to a process pool; the row order does not depend on it.
    """
    tasks = []
    for N in plan.sizes:
        for spec in plan.state_kinds:
            state: PreparedState = prepare_initial(ModelParams(N, plan.h_i), spec)
            tasks.extend((state, hf, plan.epsilon, plan.observables, plan.merge_tol) for hf in plan.hf_grid)
    if n_jobs > 1:
        with ProcessPoolExecutor(n_jobs) as pool:
            return list(pool.map(_cell, tasks, chunksize=max(1, len(tasks) // (4 * n_jobs))))
    return [_cell(t) for t in tasks]


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if math.isnan(v) else f"{v:.17g}"


def write_sweep_csv(rows: Iterable[SweepRow], fh: IO[str]) -> None:
    fh.write(",".join(CSV_COLUMNS) + "\n")
    for r in rows:
        fh.write(",".join(_fmt(getattr(r, c)) for c in CSV_COLUMNS) + "\n")


def _kind_of(rows: Sequence[SweepRow], kind: str | None) -> str:
    kinds = list(dict.fromkeys(r.kind for r in rows))
    if kind is None:
        if len(kinds) != 1:
            raise ValueError(f"table holds several state kinds {kinds}; pass kind=")
        return kinds[0]
    if kind not in kinds:
        raise ValueError(f"kind {kind!r} not in table")
    return kind


def entropy_peak(rows: Sequence[SweepRow], n_spins: int, kind: str | None = None) -> float:
    """Grid value of h_f where S_W is largest for one (N, kind)."""
    kind = _kind_of(rows, kind)
    sel = [r for r in rows if r.N == n_spins and r.kind == kind]
    if not sel:
        raise ValueError(f"no rows for N={n_spins}")
    return max(sel, key=lambda r: r.entropy).hf


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    points: list[tuple[int, float]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r_squared,
            "points": [{"N": n, "Smax": s} for n, s in self.points],
        }


def fit_entropy_scaling(rows: Sequence[SweepRow], kind: str | None = None) -> ScalingFit:
    """Least squares of max_{h_f} S_W against log2 N."""
    kind = _kind_of(rows, kind)
    smax: dict[int, float] = {}
    for r in rows:
        if r.kind == kind:
            smax[r.N] = max(smax.get(r.N, -math.inf), r.entropy)
    if len(smax) < 3:
        raise ValueError(f"need at least 3 system sizes for a scaling fit, got {len(smax)}")
    sizes = sorted(smax)
    x = np.log2(sizes)
    y = np.array([smax[n] for n in sizes])
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else float(ss_res == 0)
    return ScalingFit(float(slope), float(intercept), min(1.0, max(0.0, r2)), [(n, smax[n]) for n in sizes])


def compare_symmetry(
    rows: Sequence[SweepRow], broken: str = "fsb+", symmetric: str = "sym"
) -> list[tuple[int, float, float]]:
    """``(N, h_f, S_broken - S_symmetric)`` on the common (N, h_f) cells."""
    a = {(r.N, r.hf): r.entropy for r in rows if r.kind == broken}
    b = {(r.N, r.hf): r.entropy for r in rows if r.kind == symmetric}
    if not a or not b:
        raise ValueError(f"table needs both {broken!r} and {symmetric!r} rows")
    if set(a) != set(b):
        raise ValueError("state kinds were evaluated on different (N, h_f) grids")
    return [(n, hf, a[(n, hf)] - b[(n, hf)]) for n, hf in sorted(a)]
