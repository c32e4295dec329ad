"""Large-N energy surface from spin coherent states, and the critical quench it predicts.

Energies here are per ``N/2`` with the constant ``hN/2`` dropped ("surface
units"); :func:`to_spectrum_units` converts to the extensive energies of the
bosonic Hamiltonian, in which the ESQPT sits at E = 0.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = [
    "alpha_gs",
    "critical_energy",
    "critical_field",
    "energy_surface",
    "quenched_energy_sc",
    "to_spectrum_units",
]


def energy_surface(alpha, h):
    """``((alpha^4 - 1) h - 2 alpha^2) / (1 + alpha^2)^2``; broadcasts over arrays."""
    a2 = np.square(alpha)
    out = ((a2 * a2 - 1) * h - 2 * a2) / (1 + a2) ** 2
    return float(out) if np.ndim(out) == 0 else out


def alpha_gs(h: float) -> tuple[float, ...]:
    """Minimizers of :func:`energy_surface`: ``(0,)`` above h = 1, else the two broken branches."""
    if h < 0:
        raise ValueError(f"field must be >= 0, got {h}")
    if h > 1:
        return (0.0,)
    a = math.sqrt((1 - h) / (1 + h))
    return (a, -a)


def critical_energy(h: float) -> float:
    """ESQPT energy ``-h`` (surface units), defined for ``0 <= h <= 1``."""
    if not 0 <= h <= 1:
        raise ValueError(f"ESQPT critical energy defined for 0 <= h <= 1, got {h}")
    return -h


def critical_field(h_i: float) -> float:
    """Quench field ``(1 + h_i) / 2`` that brings the ground state at ``h_i`` to the ESQPT."""
    if not 0 <= h_i <= 1:
        raise ValueError(
            f"critical quench field needs 0 <= h_i <= 1, got {h_i}; for h_i > 1 the "
            "quenched energy is -h_f, the ground energy (h_f >= 1) or the ESQPT energy (h_f < 1)"
        )
    return (1 + h_i) / 2


def quenched_energy_sc(h_i: float, h_f: float) -> float:
    """Surface energy at ``h_f`` of the coherent ground state of ``h_i``."""
    if h_f < 0:
        raise ValueError(f"field must be >= 0, got {h_f}")
    return energy_surface(alpha_gs(h_i)[0], h_f)


def to_spectrum_units(e_sc: float, h: float, n_spins: int) -> float:
    """``(N/2) (e_sc + h)``: surface energy to the extensive bosonic-Hamiltonian energy."""
    if n_spins <= 0 or n_spins % 2:
        raise ValueError(f"n_spins must be even and positive, got {n_spins}")
    return (n_spins / 2) * (e_sc + h)
