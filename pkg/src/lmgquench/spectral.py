"""Certified diagonalization and spectral diagnostics (density of states, doublets)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eig_banded, eigh_tridiagonal

from .model import HamiltonianMatrix, Parity, split_parity_blocks

__all__ = [
    "DEFAULT_DEGENERACY_THRESHOLD",
    "RESIDUAL_TOLERANCE",
    "ConvergenceError",
    "DegeneracyReport",
    "DensityOfStates",
    "EigenDecomposition",
    "degeneracy_scan",
    "density_of_states",
    "diagonalize",
]

RESIDUAL_TOLERANCE = 1e-10
DEFAULT_DEGENERACY_THRESHOLD = 1e-8


class ConvergenceError(RuntimeError):
    """Raised when an eigendecomposition misses the residual bound."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (worst residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns).

    ``parities`` holds the parity of each eigenvector, or 0 where the vector
    mixes both sectors (only possible when the bias is non-zero).
    """

    values: np.ndarray
    vectors: np.ndarray
    residual_bound: float
    parities: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.size

    def orthonormality_error(self) -> float:
        """Largest absolute entry of ``V^T V - I``."""
        v = self.vectors
        gram = v.T @ v
        gram[np.diag_indices_from(gram)] -= 1.0
        return float(np.abs(gram).max())

    def sector(self, parity: Parity) -> np.ndarray:
        """Indices (into ``values``) of the eigenstates with the given parity."""
        return np.flatnonzero(self.parities == int(parity))


def _residual_bound(H: HamiltonianMatrix, values: np.ndarray, vectors: np.ndarray) -> float:
    r = H.matvec(vectors) - vectors * values
    return float(np.linalg.norm(r, axis=0).max() / max(H.inf_norm(), np.finfo(float).tiny))


def _sector_eigh(H: HamiltonianMatrix, parity: Parity, blocks) -> tuple[np.ndarray, np.ndarray]:
    d, e = blocks[parity]
    if d.size == 1:
        w, v = d.copy(), np.ones((1, 1))
    else:
        w, v = eigh_tridiagonal(d, e)
    full = np.zeros((H.dim, w.size))
    full[parity.offset :: 2] = v
    return w, full


def diagonalize(H: HamiltonianMatrix, sector: Parity | int | None = None) -> EigenDecomposition:
    """Full eigendecomposition of a banded LMG matrix.

    Without bias the two parity blocks are diagonalized separately (tridiagonal
    solver) and merged, so each eigenvector lies in exactly one sector even
    across exponentially small doublet splittings. With bias the full band
    matrix goes to the banded solver. Passing ``sector`` restricts the result to
    one block; eigenvectors are still embedded in the full ``N+1`` basis.
    """
    if sector is not None:
        sector = Parity(sector)
        blocks = split_parity_blocks(H)
        values, vectors = _sector_eigh(H, sector, blocks)
        parities = np.full(values.size, int(sector))
    elif not H.has_odd_couplings:
        blocks = split_parity_blocks(H)
        parts = [_sector_eigh(H, p, blocks) for p in Parity]
        values = np.concatenate([w for w, _ in parts])
        vectors = np.concatenate([v for _, v in parts], axis=1)
        parities = np.concatenate([np.full(w.size, int(p)) for p, (w, _) in zip(Parity, parts)])
        order = np.argsort(values, kind="stable")
        values, vectors, parities = values[order], vectors[:, order], parities[order]
    else:
        values, vectors = eig_banded(H.lower_banded(), lower=True)
        parities = np.zeros(values.size, dtype=int)

    residual = _residual_bound(H, values, vectors)
    if not residual < RESIDUAL_TOLERANCE:
        raise ConvergenceError("eigendecomposition failed the residual check", residual)
    for a in (values, vectors, parities):
        a.setflags(write=False)
    return EigenDecomposition(values, vectors, residual, parities)


@dataclass(frozen=True)
class DensityOfStates:
    bin_centers: np.ndarray
    counts: np.ndarray
    smoothed: np.ndarray
    bin_width: float

    @property
    def peak_index(self) -> int:
        return int(np.argmax(self.smoothed))

    @property
    def peak_energy(self) -> float:
        return float(self.bin_centers[self.peak_index])


def density_of_states(values, bin_width: float | None = None) -> DensityOfStates:
    """Histogram of levels on uniform bins starting at the lowest level.

    ``smoothed`` is counts per unit energy. The default bin width is
    ``(E_max - E_min) / sqrt(D)``.
    """
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        raise ValueError("empty spectrum")
    lo, hi = values[0], values[-1]
    if bin_width is None:
        bin_width = (hi - lo) / math.sqrt(values.size) if hi > lo else 1.0
    if not bin_width > 0:
        raise ValueError(f"bin_width must be > 0, got {bin_width}")
    span = (hi - lo) / bin_width
    nbins = max(1, math.ceil(span - 1e-9))
    # boundary levels go to the upper bin; rounding of E/bin_width must not flip them
    idx = np.clip(np.floor((values - lo) / bin_width + 1e-9).astype(int), 0, nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    centers = lo + (np.arange(nbins) + 0.5) * bin_width
    return DensityOfStates(centers, counts, counts / bin_width, float(bin_width))


@dataclass(frozen=True)
class DegeneracyReport:
    """Consecutive level pairs closer than ``threshold``.

    ``pairs`` rows are ``(k, E[k+1] - E[k], (E[k] + E[k+1]) / 2)``.
    """

    pairs: list[tuple[int, float, float]]
    threshold: float

    def __len__(self):
        return len(self.pairs)

    @property
    def fraction_below_zero(self) -> float:
        """Fraction of reported pairs whose mean energy is negative."""
        if not self.pairs:
            return 0.0
        return sum(1 for _, _, e in self.pairs if e < 0) / len(self.pairs)

    def paired_mask(self, n_levels: int) -> np.ndarray:
        """Boolean mask over levels that belong to at least one reported pair."""
        mask = np.zeros(n_levels, dtype=bool)
        for k, _, _ in self.pairs:
            mask[k] = mask[k + 1] = True
        return mask


def degeneracy_scan(values, threshold: float = DEFAULT_DEGENERACY_THRESHOLD) -> DegeneracyReport:
    if not threshold > 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ValueError("values must be one-dimensional")
    if np.any(np.diff(values) < 0):
        raise ValueError("values must be sorted ascending")
    gaps = np.diff(values)
    ks = np.flatnonzero(gaps < threshold)
    pairs = [(int(k), float(gaps[k]), float((values[k] + values[k + 1]) / 2)) for k in ks]
    return DegeneracyReport(pairs, float(threshold))
