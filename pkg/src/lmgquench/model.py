"""LMG Hamiltonian in the two-boson occupation basis |N, n_t>.

The basis index ``n_t`` (number of ``t`` bosons, 0..N) equals ``S_z + N/2``.
All matrices are real symmetric with bandwidth 2 and are stored by diagonals.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import IO

import numpy as np

__all__ = [
    "BIAS_WARN_LEVEL",
    "HamiltonianMatrix",
    "ModelParams",
    "Parity",
    "basis_parity",
    "build_hamiltonian",
    "build_sx",
    "dicke_oracle_hamiltonian",
    "split_parity_blocks",
]

BIAS_WARN_LEVEL = 0.01


class Parity(enum.IntEnum):
    """Eigenvalue of the parity operator exp(i pi n_t)."""

    PLUS = 1
    MINUS = -1

    @property
    def offset(self) -> int:
        """First occupation number in this sector (0 for PLUS, 1 for MINUS)."""
        return 0 if self is Parity.PLUS else 1


@dataclass(frozen=True)
class ModelParams:
    """One LMG Hamiltonian instance.

    Parameters
    ----------
    n_spins : int
        Number of spin-1/2 sites ``N``; must be even and >= 2.
    field : float
        Transverse field ``h >= 0``.
    bias : float
        Strength of the symmetry-breaking ``S_x`` term.
    """

    n_spins: int
    field: float
    bias: float = 0.0

    def __post_init__(self):
        n = self.n_spins
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise ValueError(f"n_spins must be an integer, got {n!r}")
        if n < 2 or n % 2:
            raise ValueError(f"n_spins must be even and >= 2, got {n}")
        if not np.isfinite(self.field) or self.field < 0:
            raise ValueError(f"field must be finite and >= 0, got {self.field}")
        if not np.isfinite(self.bias):
            raise ValueError(f"bias must be finite, got {self.bias}")
        object.__setattr__(self, "n_spins", int(n))
        object.__setattr__(self, "field", float(self.field))
        object.__setattr__(self, "bias", float(self.bias))
        if abs(self.bias) >= BIAS_WARN_LEVEL:
            warnings.warn(
                f"|bias| = {abs(self.bias):g} is not small; symmetry-breaking "
                "results assume |bias| << 1",
                stacklevel=3,
            )

    @property
    def dim(self) -> int:
        return self.n_spins + 1

    def with_field(self, field: float, bias: float | None = None) -> "ModelParams":
        return ModelParams(self.n_spins, field, self.bias if bias is None else bias)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Real symmetric matrix of bandwidth 2, stored as its three lower diagonals.

    ``diagonals[k][i]`` is the element ``(i + k, i)`` (equivalently ``(i, i + k)``).
    """

    diagonals: tuple[np.ndarray, np.ndarray, np.ndarray]
    params: ModelParams | None = field(default=None, compare=False)

    bandwidth = 2

    def __post_init__(self):
        d0, d1, d2 = (_frozen(d) for d in self.diagonals)
        n = d0.size
        if n < 3 or d1.size != n - 1 or d2.size != n - 2:
            raise ValueError("inconsistent diagonal lengths")
        if not (np.isfinite(d0).all() and np.isfinite(d1).all() and np.isfinite(d2).all()):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "diagonals", (d0, d1, d2))

    @classmethod
    def from_dense(cls, a: np.ndarray, params: ModelParams | None = None) -> "HamiltonianMatrix":
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        outside = np.abs(np.tril(a, -3)).max(initial=0.0) + np.abs(np.triu(a, 3)).max(initial=0.0)
        if a.shape != (n, n) or outside > 0:
            raise ValueError("matrix is not square with bandwidth <= 2")
        lower = [np.diagonal(a, -k) for k in range(3)]
        upper = [np.diagonal(a, k) for k in range(3)]
        if any(not np.allclose(lo, up, rtol=1e-13, atol=1e-13) for lo, up in zip(lower, upper)):
            raise ValueError("matrix is not symmetric")
        return cls(tuple((lo + up) / 2 for lo, up in zip(lower, upper)), params)

    @property
    def dim(self) -> int:
        return self.diagonals[0].size

    @property
    def diag(self) -> np.ndarray:
        return self.diagonals[0]

    @property
    def has_odd_couplings(self) -> bool:
        return bool(np.any(self.diagonals[1] != 0))

    def to_dense(self) -> np.ndarray:
        d0, d1, d2 = self.diagonals
        a = np.diag(d0)
        a += np.diag(d1, 1) + np.diag(d1, -1)
        a += np.diag(d2, 2) + np.diag(d2, -2)
        return a

    def lower_banded(self) -> np.ndarray:
        """Lower band storage as accepted by ``scipy.linalg.eig_banded(lower=True)``."""
        ab = np.zeros((3, self.dim))
        for k, d in enumerate(self.diagonals):
            ab[k, : d.size] = d
        return ab

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Product with a vector or with the columns of a 2-D array."""
        x = np.asarray(x)
        d0, d1, d2 = self.diagonals
        if x.ndim == 2:
            d0, d1, d2 = d0[:, None], d1[:, None], d2[:, None]
        y = d0 * x
        y[:-1] += d1 * x[1:]
        y[1:] += d1 * x[:-1]
        y[:-2] += d2 * x[2:]
        y[2:] += d2 * x[:-2]
        return y

    def expectation(self, psi: np.ndarray) -> float:
        return float(np.real(np.vdot(psi, self.matvec(psi))))

    def inf_norm(self) -> float:
        d0, d1, d2 = (np.abs(d) for d in self.diagonals)
        rows = d0.copy()
        rows[:-1] += d1
        rows[1:] += d1
        rows[:-2] += d2
        rows[2:] += d2
        return float(rows.max())

    def dump(self, fh: IO[str]) -> None:
        """Write the lower triangle as ``n_t n_t' value`` lines (stored entries only)."""
        for k, d in enumerate(self.diagonals):
            for i, v in enumerate(d):
                fh.write(f"{i + k} {i} {v:.17g}\n")


def basis_parity(n_spins: int) -> np.ndarray:
    """Parity (+1/-1) of each basis state |N, n_t>."""
    return np.where(np.arange(n_spins + 1) % 2 == 0, 1, -1)


def build_hamiltonian(params: ModelParams) -> HamiltonianMatrix:
    """Matrix of ``h t't - (t's + s't)^2 / 4N + bias * S_x`` in the |N, n_t> basis."""
    N = params.n_spins
    n = np.arange(N + 1, dtype=float)
    diag = params.field * n - ((n + 1) * (N - n) + n * (N - n + 1)) / (4 * N)
    m = n[:-2]
    second = -np.sqrt((m + 1) * (N - m) * (m + 2) * (N - m - 1)) / (4 * N)
    m = n[:-1]
    first = (params.bias / 2) * np.sqrt((N - m) * (m + 1))
    return HamiltonianMatrix((diag, first, second), params)


def build_sx(params: ModelParams) -> HamiltonianMatrix:
    """Matrix of ``S_x = (S+ + S-)/2``; only nearest-neighbour couplings."""
    N = params.n_spins
    m = np.arange(N, dtype=float)
    first = 0.5 * np.sqrt((N - m) * (m + 1))
    return HamiltonianMatrix((np.zeros(N + 1), first, np.zeros(N - 1)), params)


def split_parity_blocks(H: HamiltonianMatrix) -> dict[Parity, tuple[np.ndarray, np.ndarray]]:
    """Split a parity-conserving matrix into its two tridiagonal sector blocks.

    Returns ``{Parity.PLUS: (diag, offdiag), Parity.MINUS: (diag, offdiag)}``, the
    PLUS block living on even ``n_t`` and the MINUS block on odd ``n_t``.
    """
    if H.has_odd_couplings:
        raise ValueError("matrix couples opposite parities (bias != 0); no parity blocks")
    d0, _, d2 = H.diagonals
    return {p: (d0[p.offset :: 2].copy(), d2[p.offset :: 2].copy()) for p in Parity}


def _spin_matrices(n_spins: int) -> tuple[np.ndarray, np.ndarray]:
    j = n_spins / 2
    m = np.arange(-j, j + 1)
    sz = np.diag(m)
    # <m+1|S+|m>
    up = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    sp = np.diag(up, -1)
    sx = (sp + sp.T) / 2
    return sx, sz


def dicke_oracle_hamiltonian(params: ModelParams) -> HamiltonianMatrix:
    """``-S_x^2/N + h (S_z + N/2) + bias S_x`` built from dense spin-J matrices.

    Independent of :func:`build_hamiltonian`; used as a cross-check.
    """
    N = params.n_spins
    sx, sz = _spin_matrices(N)
    h = -(sx @ sx) / N + params.field * (sz + (N / 2) * np.eye(N + 1)) + params.bias * sx
    return HamiltonianMatrix.from_dense(h, params)
