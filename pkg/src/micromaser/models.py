"""Physical model assembly: reservoir specs, thermal states and Hamiltonians.

Units: hbar = 1, k_B = 1, and the cavity mode frequency Omega is the
reference scale (default 1), so times are dimensionless multiples of
1/Omega and temperatures come in units of the relevant level spacing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GainRegimeError
from .linalg import HilbertSpec, dagger, kron, kron_all
from .operators import (
    ATOM_COUNT_CAP,
    annihilation,
    collective_spin,
    lift,
    multilevel_transition,
    number_op,
    pauli,
    projector,
)

#: Reservoir kinds: a cluster of N identical two-level atoms, or a single
#: atom with one excited level and N degenerate ground levels.
MULTI_ATOM = "multi-atom"
MULTILEVEL = "multilevel"
RESERVOIR_KINDS = (MULTI_ATOM, MULTILEVEL)

#: Above this product the second-order (one-exchange) treatment of a
#: collision window starts to degrade; larger values only get a warning.
PHI_WARN_THRESHOLD = 0.3

#: Thermal-tail population of the top retained Fock level that triggers an
#: adequacy warning when preparing initial states.
TAIL_WARN_THRESHOLD = 1e-6


@dataclass(frozen=True)
class ReservoirSpec:
    """Injected-atom reservoir: kind, size parameter N and temperature.

    ``T_a`` is the atomic temperature in units of omega/k_B; ``omega`` is
    the atomic level spacing in units of Omega (resonant by default).
    """

    kind: str
    N: int
    T_a: float
    omega: float = 1.0

    def __post_init__(self):
        if self.kind not in RESERVOIR_KINDS:
            raise DomainError(
                f"reservoir.kind must be one of {RESERVOIR_KINDS}, got {self.kind!r}"
            )
        object.__setattr__(self, "N", int(self.N))
        if self.N < 1:
            raise DomainError(f"reservoir.N must be >= 1, got {self.N}")
        if not self.T_a > 0:
            raise DomainError(f"reservoir.T_a must be > 0, got {self.T_a}")
        if not self.omega > 0:
            raise DomainError(f"reservoir.omega must be > 0, got {self.omega}")


@dataclass(frozen=True)
class FieldSpec:
    """Cavity mode: frequency, Fock truncation and initial temperature."""

    Omega: float = 1.0
    dim: int = 15
    T_f0: float = 0.0

    def __post_init__(self):
        if not self.Omega > 0:
            raise DomainError(f"field.Omega must be > 0, got {self.Omega}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.dim < 2:
            raise DomainError(f"field.dim must be >= 2, got {self.dim}")
        if self.T_f0 < 0:
            raise DomainError(f"field.T_f0 must be >= 0, got {self.T_f0}")


@dataclass(frozen=True)
class CouplingSpec:
    """Atom-field coupling and collision timing.

    ``tau`` is the interaction window, ``tau0`` the idle time between
    injections, so the injection rate is r = 1/(tau + tau0).  ``gamma`` and
    ``kappa`` are the atomic and cavity decay rates; their defaults are
    negligible on collision timescales but retained for fidelity.
    """

    g: float
    tau: float
    tau0: float = 0.0
    gamma: float = 1e-9
    kappa: float = 0.5e-10

    def __post_init__(self):
        if not self.g >= 0:
            raise DomainError(f"coupling.g must be >= 0, got {self.g}")
        if not self.tau > 0:
            raise DomainError(f"coupling.tau must be > 0, got {self.tau}")
        if self.tau0 < 0:
            raise DomainError(f"coupling.tau0 must be >= 0, got {self.tau0}")
        if self.gamma < 0 or self.kappa < 0:
            raise DomainError("decay rates gamma and kappa must be >= 0")
        if self.phi > PHI_WARN_THRESHOLD:
            warnings.warn(
                f"g*tau = {self.phi:.3g} exceeds {PHI_WARN_THRESHOLD}; the "
                "second-order rate picture degrades",
                stacklevel=2,
            )

    @property
    def phi(self) -> float:
        """Collision pulse area g*tau."""
        return self.g * self.tau

    @property
    def rate(self) -> float:
        """Injection rate r = 1/(tau + tau0)."""
        return 1.0 / (self.tau + self.tau0)


def two_level_populations(omega: float, T_a: float) -> tuple[float, float]:
    """Thermal populations (p_e, p_g) of a two-level atom.

    Solves p_g/p_e = exp(omega/T_a) with p_e + p_g = 1.  Only positive
    temperatures are admitted; population inversion is out of scope.
    """
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    if not T_a > 0:
        raise DomainError(f"T_a must be > 0, got {T_a}")
    x = omega / T_a
    # 1/(1+e^x) evaluated stably for large x
    p_e = math.exp(-x) / (1.0 + math.exp(-x)) if x > 0 else 1.0 / (1.0 + math.exp(x))
    return p_e, 1.0 - p_e


def multilevel_populations(N: int, omega: float, T_a: float) -> tuple[float, float]:
    """Thermal populations (p_e, p_g') of an (N+1)-level atom.

    The N ground levels are degenerate and equally populated, so
    N*p_g'/p_e = exp(omega/T_a) and p_e + N*p_g' = 1.  Requires
    exp(omega/T_a) > N, otherwise p_g' <= p_e and the reservoir pumps the
    field instead of thermalizing it.
    """
    N = int(N)
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    if not T_a > 0:
        raise DomainError(f"T_a must be > 0, got {T_a}")
    x = omega / T_a
    if x <= math.log(N):
        raise GainRegimeError(
            f"exp(omega/T_a) = {math.exp(x):.6g} <= N = {N}: p_g' <= p_e gives a "
            "non-positive decay rate, no thermal steady state"
        )
    p_e = math.exp(-x) / (1.0 + math.exp(-x))
    return p_e, (1.0 - p_e) / N


def thermal_occupations(Omega: float, dim: int, T: float) -> np.ndarray:
    """Boltzmann weights p_n over a truncated Fock space, normalized to 1."""
    if T == 0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    weights = np.exp(-np.arange(dim) * Omega / T)
    return weights / weights.sum()


def thermal_tail_population(Omega: float, dim: int, T: float) -> float:
    """Population of the top retained level |dim-1> of a thermal state."""
    return float(thermal_occupations(Omega, dim, T)[-1])


def thermal_field_state(field: FieldSpec) -> np.ndarray:
    """Thermal cavity state exp(-H_f/T)/Z on the truncated space.

    Diagonal with geometric weights renormalized over the retained levels;
    T_f0 = 0 yields the vacuum projector.  Warns when the top level holds
    more than the adequacy threshold.
    """
    p = thermal_occupations(field.Omega, field.dim, field.T_f0)
    if p[-1] >= TAIL_WARN_THRESHOLD:
        warnings.warn(
            f"thermal state at T={field.T_f0:g} keeps {p[-1]:.3g} of its weight "
            f"on the top Fock level; increase dim={field.dim}",
            stacklevel=2,
        )
    return np.diag(p).astype(complex)


def _diagonal_cluster(N: int, p_e: float) -> np.ndarray:
    single = np.diag([p_e, 1.0 - p_e]).astype(complex)
    return kron_all([single] * N)


def atom_cluster_state(N: int, p_e: float) -> np.ndarray:
    """State of N identical uncorrelated thermal two-level atoms.

    N-fold Kronecker power of diag(p_e, p_g); purely diagonal, carrying no
    coherence.  Thermal occupation requires 0 <= p_e < 0.5.
    """
    N = int(N)
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if not 0 <= p_e < 0.5:
        raise DomainError(f"thermal cluster needs 0 <= p_e < 0.5, got {p_e}")
    return _diagonal_cluster(N, p_e)


def multilevel_atom_state(N: int, p_e: float) -> np.ndarray:
    """diag(p_e, p_g', ..., p_g') with p_g' = (1 - p_e)/N."""
    N = int(N)
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if not 0 <= p_e <= 1:
        raise DomainError(f"p_e must lie in [0, 1], got {p_e}")
    p_g = (1.0 - p_e) / N
    return np.diag([p_e] + [p_g] * N).astype(complex)


def jc_interaction(field: FieldSpec, g: float) -> np.ndarray:
    """g(sigma_+ a + sigma_- a^dagger) on the (2, dim) joint space."""
    a = annihilation(field.dim)
    return g * (kron(pauli("plus"), a) + kron(pauli("minus"), dagger(a)))


def hamiltonian_jc(field: FieldSpec, omega: float, g: float) -> np.ndarray:
    """Single two-level atom exchanging one excitation with the mode (RWA).

    Omega a^dagger a + (omega/2) sigma_z + g(sigma_+ a + sigma_- a^dagger)
    on the (2, dim) joint space, atom first.
    """
    spec = HilbertSpec((2, field.dim))
    h = field.Omega * lift(number_op(field.dim), spec, 1)
    h += 0.5 * omega * lift(pauli("z"), spec, 0)
    h += jc_interaction(field, g)
    return h


def tc_interaction(field: FieldSpec, g: float, N: int) -> np.ndarray:
    """g(a^dagger S_- + a S_+) on the (2^N, dim) joint space."""
    a = annihilation(field.dim)
    return g * (
        kron(collective_spin(N, "minus"), dagger(a))
        + kron(collective_spin(N, "plus"), a)
    )


def hamiltonian_tc(field: FieldSpec, omega: float, g: float, N: int) -> np.ndarray:
    """N two-level atoms collectively coupled to the mode.

    Omega a^dagger a + omega S_z + g(a^dagger S_- + a S_+); for N = 1 the
    S_z = sigma_z/2 convention makes this identical to the single-atom form.
    """
    spec = HilbertSpec((2**N, field.dim))
    h = field.Omega * lift(number_op(field.dim), spec, 1)
    h += omega * lift(collective_spin(N, "z"), spec, 0)
    h += tc_interaction(field, g, N)
    return h


def multilevel_interaction(field: FieldSpec, g: float, N: int) -> np.ndarray:
    """g(R_+ a + R_- a^dagger) on the (N+1, dim) joint space."""
    a = annihilation(field.dim)
    return g * (
        kron(multilevel_transition(N, "plus"), a)
        + kron(multilevel_transition(N, "minus"), dagger(a))
    )


def hamiltonian_multilevel(field: FieldSpec, omega: float, g: float, N: int) -> np.ndarray:
    """One excited level above N degenerate ground levels, coupled to the mode.

    Omega a^dagger a + omega |e><e| + g(R_+ a + R_- a^dagger); the ground
    levels sit at zero energy exactly.
    """
    N = int(N)
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    spec = HilbertSpec((N + 1, field.dim))
    h = field.Omega * lift(number_op(field.dim), spec, 1)
    h += omega * lift(projector(N + 1, 0), spec, 0)
    h += multilevel_interaction(field, g, N)
    return h


def reservoir_populations(reservoir: ReservoirSpec) -> tuple[float, float]:
    """(p_e, p_ground) for either reservoir kind.

    For a multi-atom cluster p_ground is the two-level p_g; for the
    multilevel atom it is the single-ground-level population p_g'.
    """
    if reservoir.kind == MULTI_ATOM:
        return two_level_populations(reservoir.omega, reservoir.T_a)
    return multilevel_populations(reservoir.N, reservoir.omega, reservoir.T_a)


def reservoir_state(reservoir: ReservoirSpec) -> np.ndarray:
    """Fresh injected-atom density matrix for one collision."""
    p_e, _ = reservoir_populations(reservoir)
    if reservoir.kind == MULTI_ATOM:
        return atom_cluster_state(reservoir.N, p_e)
    return multilevel_atom_state(reservoir.N, p_e)


def reservoir_hamiltonian(reservoir: ReservoirSpec, field: FieldSpec, g: float) -> np.ndarray:
    """Joint Hamiltonian matching the reservoir kind."""
    if reservoir.kind == MULTI_ATOM:
        if reservoir.N > ATOM_COUNT_CAP:
            raise DomainError(
                f"multi-atom cluster N={reservoir.N} exceeds cap {ATOM_COUNT_CAP}"
            )
        return hamiltonian_tc(field, reservoir.omega, g, reservoir.N)
    return hamiltonian_multilevel(field, reservoir.omega, g, reservoir.N)


def reservoir_steady_photon_number(reservoir: ReservoirSpec) -> float:
    """Fixed point of the coarse-grained photon rate equation.

    p_e/(p_g - p_e) for the cluster (the Bose-Einstein occupation at T_a);
    p_e/(p_g' - p_e) for the multilevel atom, whose implied temperature
    exceeds T_a once N > 1.
    """
    p_e, p_ground = reservoir_populations(reservoir)
    if p_ground <= p_e:
        raise GainRegimeError("reservoir populations give no thermal steady state")
    return p_e / (p_ground - p_e)
