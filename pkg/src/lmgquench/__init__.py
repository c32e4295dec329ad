"""Exact-diagonalization quench dynamics of the Lipkin-Meshkov-Glick model."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    HamiltonianMatrix,
    ModelParams,
    Parity,
    build_hamiltonian,
    build_sx,
    dicke_oracle_hamiltonian,
    split_parity_blocks,
)
from .quench import (  # noqa: E402
    InitialStateSpec,
    QuenchResult,
    StateKind,
    WorkDistribution,
    diagonal_entropy,
    prepare_initial,
    quench_state,
    revival_period,
    run_quench,
    survival_probability,
    transition_probabilities,
    work_distribution,
    work_moments,
)
from .semiclassics import (  # noqa: E402
    alpha_gs,
    critical_field,
    energy_surface,
    quenched_energy_sc,
    to_spectrum_units,
)
from .spectral import (  # noqa: E402
    ConvergenceError,
    EigenDecomposition,
    degeneracy_scan,
    density_of_states,
    diagonalize,
)
from .sweep import SweepPlan, compare_symmetry, fit_entropy_scaling, run_sweep  # noqa: E402
