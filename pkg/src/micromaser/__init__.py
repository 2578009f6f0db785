"""Collision-model thermalization of a single cavity mode by injected atoms.

Simulates the repeated-injection (micromaser) dynamics of a truncated
single-mode field coupled to thermal multi-atom clusters or multilevel
atoms, and provides the matching closed-form rates, thermalization times
and photon-statistics diagnostics.
"""

from .analytics import (
    DecayFit,
    RatePair,
    ThermalizationPrediction,
    analytic_trajectory,
    bose_einstein_occupation,
    decay_rate,
    diagonal_ratio_temperature,
    field_temperature,
    fit_decay_rate,
    g2_zero,
    mean_photon_number,
    rates,
    thermalization_time,
)
from .config import SimulationConfig, config_from_mapping, default_fock_dim, parse_config
from .dynamics import (
    IntegratorSettings,
    LindbladGenerator,
    TimeSeries,
    collision_step,
    diagonal_collision_map,
    dissipator,
    evolve,
    master_rhs,
    run_simulation,
)
from .errors import (
    ConfigError,
    DimensionLimitError,
    DivergenceError,
    DomainError,
    FitError,
    GainRegimeError,
    MicromaserError,
    SettingsError,
    ShapeError,
    SymmetryError,
    TruncationError,
    UndefinedCorrelationError,
)
from .linalg import (
    HilbertSpec,
    check_density_matrix,
    dagger,
    expm,
    hermitian_eigenvalues,
    hermiticity_defect,
    kron,
    partial_trace,
)
from .models import (
    MULTI_ATOM,
    MULTILEVEL,
    CouplingSpec,
    FieldSpec,
    ReservoirSpec,
    atom_cluster_state,
    hamiltonian_jc,
    hamiltonian_multilevel,
    hamiltonian_tc,
    jc_interaction,
    multilevel_atom_state,
    multilevel_interaction,
    multilevel_populations,
    reservoir_state,
    reservoir_steady_photon_number,
    tc_interaction,
    thermal_field_state,
    two_level_populations,
)
from .operators import (
    annihilation,
    basis_ket,
    collective_spin,
    creation,
    lift,
    multilevel_transition,
    number_op,
    pauli,
    projector,
)

__version__ = "0.1.0"
