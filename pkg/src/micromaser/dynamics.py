"""Lindblad integration and the repeated-injection collision driver.

One collision couples a fresh thermal atom (cluster or multilevel) to the
cavity mode for a window ``tau`` under the microscopic master equation,
then traces the atoms out; the mode alone decays during any idle time
``tau0``.  A full run iterates collisions until the photon number settles
or the collision budget runs out.

The collision map is linear in the field state and, for the diagonal
states every thermal scenario produces, closes on the diagonal; the run
driver exploits that by precomputing the per-collision transfer matrix
once and iterating matrix-vector products.  The direct per-collision path
remains as the general (and bitwise independently testable) route.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .analytics import field_temperature, g2_zero, thermalization_time
from .errors import (
    DivergenceError,
    DomainError,
    SettingsError,
    ShapeError,
    SymmetryError,
    TruncationError,
    UndefinedCorrelationError,
)
from .linalg import HilbertSpec, check_density_matrix, dagger, hermiticity_defect, kron, partial_trace
from .models import (
    MULTI_ATOM,
    CouplingSpec,
    FieldSpec,
    ReservoirSpec,
    _diagonal_cluster,
    multilevel_atom_state,
    reservoir_hamiltonian,
    reservoir_state,
    thermal_occupations,
    thermal_tail_population,
)
from .operators import annihilation, lift, pauli, projector

if TYPE_CHECKING:
    from .config import SimulationConfig

#: Steady-state detection: relative photon-number change per collision below
#: this for STEADY_STREAK consecutive collisions ends the run early.
STEADY_REL_EPS = 1e-6
STEADY_STREAK = 50

#: Default collision budget in units of the predicted thermalization time.
BUDGET_FACTOR = 10

#: Top-Fock-level population that aborts a run as under-truncated; an order
#: of 1e-6 only warns.
TAIL_ERROR_THRESHOLD = 1e-4
TAIL_WARN_THRESHOLD = 1e-6

_DIAGONAL_TOL = 1e-13
_MAP_DEFECT_TOL = 1e-12


@dataclass(frozen=True)
class LindbladGenerator:
    """A Hermitian Hamiltonian plus rate-weighted collapse channels."""

    H: np.ndarray
    channels: tuple = ()

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ShapeError(f"Hamiltonian must be square, got shape {H.shape}")
        defect = hermiticity_defect(H)
        if defect > 1e-12:
            raise SymmetryError(f"Hamiltonian not Hermitian (defect {defect:.3e})")
        object.__setattr__(self, "H", H)
        terms = []
        normalized = []
        for op, rate in self.channels:
            op = np.asarray(op, dtype=complex)
            if op.shape != H.shape:
                raise ShapeError(
                    f"collapse operator shape {op.shape} does not match generator dim {H.shape}"
                )
            rate = float(rate)
            if rate < 0:
                raise DomainError(f"channel rate must be >= 0, got {rate}")
            normalized.append((op, rate))
            if rate > 0:
                opd = dagger(op)
                terms.append((op, opd, opd @ op, rate))
        object.__setattr__(self, "channels", tuple(normalized))
        object.__setattr__(self, "_terms", tuple(terms))

    @property
    def dim(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class IntegratorSettings:
    """Fixed-step classical RK4 settings.

    ``dt`` must not exceed tau/20 when used for collision windows; this is
    checked at the call sites that know the window length.
    """

    dt: float
    renormalize_trace: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise SettingsError(f"integrator dt must be > 0, got {self.dt}")


@dataclass
class TimeSeries:
    """Per-collision record of observables and numerical diagnostics."""

    times: np.ndarray
    n_mean: np.ndarray
    T_field: np.ndarray = None
    g2: np.ndarray = None
    trace_dev: np.ndarray = None
    tail_leak: np.ndarray = None
    min_eig: np.ndarray = None
    herm_defect: np.ndarray = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.n_mean = np.asarray(self.n_mean, dtype=float)
        for name in ("T_field", "g2", "trace_dev", "tail_leak", "min_eig", "herm_defect"):
            value = getattr(self, name)
            value = np.zeros_like(self.times) if value is None else np.asarray(value, dtype=float)
            setattr(self, name, value)
            if value.shape != self.times.shape:
                raise ShapeError(f"TimeSeries field {name} length differs from times")
        if self.n_mean.shape != self.times.shape:
            raise ShapeError("TimeSeries field n_mean length differs from times")

    def __len__(self) -> int:
        return len(self.times)

    def validate(self, trace_tol: float = 1e-6, leak_tol: float = TAIL_ERROR_THRESHOLD):
        """Check the run-level diagnostic bounds; returns self."""
        worst_trace = float(np.max(self.trace_dev)) if len(self) else 0.0
        if worst_trace >= trace_tol:
            raise DomainError(f"trace deviation reached {worst_trace:.3e}")
        worst_leak = float(np.max(self.tail_leak)) if len(self) else 0.0
        if worst_leak >= leak_tol:
            raise DomainError(f"top-Fock leakage reached {worst_leak:.3e}")
        return self


def dissipator(op, rho) -> np.ndarray:
    """Trace-preserving Lindblad dissipator op rho op+ - {op+ op, rho}/2."""
    op = np.asarray(op, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or op.shape != rho.shape:
        raise ShapeError(f"dissipator needs matching square operands, got {op.shape} and {rho.shape}")
    opd = dagger(op)
    opdop = opd @ op
    return op @ rho @ opd - 0.5 * (opdop @ rho + rho @ opdop)


def master_rhs(gen: LindbladGenerator, rho) -> np.ndarray:
    """-i[H, rho] plus the rate-weighted dissipators."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != gen.H.shape:
        raise ShapeError(f"state shape {rho.shape} does not match generator dim {gen.dim}")
    out = -1j * (gen.H @ rho - rho @ gen.H)
    for op, opd, opdop, rate in gen._terms:
        out += rate * (op @ rho @ opd - 0.5 * (opdop @ rho + rho @ opdop))
    return out


def evolve(gen: LindbladGenerator, rho0, duration: float, settings: IntegratorSettings) -> np.ndarray:
    """Propagate ``rho0`` for ``duration`` with fixed-step classical RK4.

    The state is re-symmetrized after every step; trace renormalization is
    applied only when the settings ask for it.
    """
    if duration < 0:
        raise DomainError(f"duration must be >= 0, got {duration}")
    rho = np.array(rho0, dtype=complex)
    if rho.shape != gen.H.shape:
        raise ShapeError(f"state shape {rho.shape} does not match generator dim {gen.dim}")
    if duration == 0:
        return rho
    # uniform steps of at most settings.dt covering the window exactly
    n_steps = max(1, math.ceil(duration / settings.dt - 1e-9))
    h = duration / n_steps
    for _ in range(n_steps):
        k1 = master_rhs(gen, rho)
        k2 = master_rhs(gen, rho + (0.5 * h) * k1)
        k3 = master_rhs(gen, rho + (0.5 * h) * k2)
        k4 = master_rhs(gen, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + dagger(rho))
        if settings.renormalize_trace:
            trace = float(np.trace(rho).real)
            if trace > 0:
                rho = rho / trace
    if not np.all(np.isfinite(rho)):
        raise DivergenceError("integrator produced non-finite entries")
    return rho


def _injected_state(reservoir: ReservoirSpec, p_excited) -> np.ndarray:
    if p_excited is None:
        return reservoir_state(reservoir)
    if not 0 <= p_excited <= 1:
        raise DomainError(f"diagnostic p_excited must lie in [0, 1], got {p_excited}")
    if reservoir.kind == MULTI_ATOM:
        return _diagonal_cluster(reservoir.N, p_excited)
    return multilevel_atom_state(reservoir.N, p_excited)


def _collision_generator(
    reservoir: ReservoirSpec, coupling: CouplingSpec, field: FieldSpec
) -> tuple[LindbladGenerator, HilbertSpec]:
    dim = field.dim
    a = annihilation(dim)
    h = reservoir_hamiltonian(reservoir, field, coupling.g)
    if reservoir.kind == MULTI_ATOM:
        # per-atom decay channels need the factorized layout (2, ..., 2, dim)
        per_atom = HilbertSpec((2,) * reservoir.N + (dim,))
        channels = [
            (lift(pauli("minus"), per_atom, i), coupling.gamma)
            for i in range(reservoir.N)
        ]
        channels.append((lift(a, per_atom, reservoir.N), coupling.kappa))
        spec = HilbertSpec((2**reservoir.N, dim))
    else:
        spec = HilbertSpec((reservoir.N + 1, dim))
        channels = []
        for m in range(1, reservoir.N + 1):
            drop = np.zeros((reservoir.N + 1, reservoir.N + 1), dtype=complex)
            drop[m, 0] = 1.0  # |g_m><e|
            channels.append((lift(drop, spec, 0), coupling.gamma))
        channels.append((lift(a, spec, 1), coupling.kappa))
    return LindbladGenerator(h, tuple(channels)), spec


def _check_window_step(settings: IntegratorSettings, tau: float):
    if settings.dt > tau / 20.0 * (1.0 + 1e-12):
        raise SettingsError(
            f"dt={settings.dt:g} exceeds the collision accuracy floor tau/20={tau / 20.0:g}"
        )


def collision_step(
    rho_f,
    reservoir: ReservoirSpec,
    coupling: CouplingSpec,
    field: FieldSpec,
    settings: IntegratorSettings | None = None,
    p_excited: float | None = None,
) -> np.ndarray:
    """One injection: couple a fresh atom for tau, trace it out, idle for tau0.

    ``p_excited`` overrides the thermal populations for diagnostics (for
    example a fully excited atom probing the exact exchange oracle).
    """
    rho_f = np.asarray(rho_f, dtype=complex)
    if rho_f.shape != (field.dim, field.dim):
        raise ShapeError(f"field state shape {rho_f.shape} does not match dim {field.dim}")
    # run-level tolerances: per-window drift is allowed to accumulate
    check_density_matrix(rho_f, hermiticity_tol=1e-10, trace_tol=1e-6, eigenvalue_floor=-1e-8)
    if settings is None:
        settings = IntegratorSettings(dt=coupling.tau / 20.0)
    _check_window_step(settings, coupling.tau)
    gen, spec = _collision_generator(reservoir, coupling, field)
    joint = kron(_injected_state(reservoir, p_excited), rho_f)
    joint = evolve(gen, joint, coupling.tau, settings)
    rho_out = partial_trace(joint, spec, keep=1)
    if coupling.tau0 > 0:
        idle = LindbladGenerator(
            np.zeros((field.dim, field.dim), dtype=complex),
            ((annihilation(field.dim), coupling.kappa),),
        )
        rho_out = evolve(idle, rho_out, coupling.tau0, settings)
    return rho_out


def diagonal_collision_map(
    reservoir: ReservoirSpec,
    coupling: CouplingSpec,
    field: FieldSpec,
    settings: IntegratorSettings | None = None,
) -> np.ndarray:
    """Per-collision transfer matrix restricted to diagonal field states.

    Column n holds the diagonal of one collision applied to |n><n|.  Raises
    :class:`SymmetryError` if any column leaks measurable off-diagonal
    weight (thermal injections never do).
    """
    dim = field.dim
    transfer = np.empty((dim, dim), dtype=complex)
    for n in range(dim):
        out = collision_step(projector(dim, n), reservoir, coupling, field, settings)
        off = float(np.max(np.abs(out - np.diag(np.diagonal(out)))))
        if off > _MAP_DEFECT_TOL:
            raise SymmetryError(
                f"collision map is not diagonal-preserving (leak {off:.3e})"
            )
        transfer[:, n] = np.diagonal(out)
    return transfer


def _sample(rho: np.ndarray, Omega: float):
    """Observables plus diagnostics for one recorded state."""
    diag = np.diagonal(rho)
    levels = np.arange(rho.shape[0])
    n_mean = float(np.real(np.sum(levels * diag)))
    trace_dev = abs(complex(np.sum(diag)) - 1.0)
    tail = float(np.real(diag[-1]))
    herm = hermiticity_defect(rho)
    off = float(np.max(np.abs(rho - np.diag(diag))))
    if off < _DIAGONAL_TOL:
        min_eig = float(np.min(np.real(diag)))
    else:
        min_eig = float(np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0])
    try:
        g2 = g2_zero(rho)
    except UndefinedCorrelationError:
        g2 = math.nan
    return n_mean, field_temperature(n_mean, Omega), g2, trace_dev, tail, min_eig, herm


def _suggest_dim(Omega: float, T_hot: float, start: int) -> int:
    for dim in range(start + 1, 201):
        if thermal_tail_population(Omega, dim, T_hot) < 1e-7:
            return dim
    return 200


def run_simulation(config: "SimulationConfig") -> TimeSeries:
    """Iterate collisions, recording observables after each one.

    Stops at the configured collision budget or once the relative
    photon-number change stays below STEADY_REL_EPS for STEADY_STREAK
    consecutive collisions.  Raises a truncation error when the top Fock
    level accumulates real weight, with a suggested replacement dimension.
    """
    field, reservoir, coupling = config.field, config.reservoir, config.coupling
    settings = config.integrator or IntegratorSettings(dt=coupling.tau / 20.0)
    _check_window_step(settings, coupling.tau)
    prediction = thermalization_time(reservoir, coupling)

    # truncation adequacy at the hotter of the initial and target occupations
    p0 = thermal_occupations(field.Omega, field.dim, field.T_f0)
    target_T = field_temperature(prediction.n_bar_th, field.Omega)
    T_hot = max(field.T_f0, target_T)
    tail_pre = max(float(p0[-1]), thermal_tail_population(field.Omega, field.dim, target_T))
    if tail_pre >= TAIL_ERROR_THRESHOLD:
        suggested = _suggest_dim(field.Omega, T_hot, field.dim)
        raise TruncationError(
            f"thermal tail {tail_pre:.3g} at dim={field.dim} exceeds "
            f"{TAIL_ERROR_THRESHOLD:g}; use dim >= {suggested}",
            suggested_dim=suggested,
        )
    if tail_pre >= TAIL_WARN_THRESHOLD:
        warnings.warn(
            f"thermal tail {tail_pre:.3g} at dim={field.dim} is marginal",
            stacklevel=2,
        )

    horizon = coupling.tau + coupling.tau0
    if config.collisions_max is not None:
        budget = int(config.collisions_max)
    else:
        budget = BUDGET_FACTOR * math.ceil(prediction.t_th / horizon)

    rho = np.diag(p0).astype(complex)
    records = [_sample(rho, field.Omega)]
    times = [0.0]

    diagonal_start = float(np.max(np.abs(rho - np.diag(np.diagonal(rho))))) < _DIAGONAL_TOL
    transfer = None
    if diagonal_start and budget > 0:
        try:
            transfer = diagonal_collision_map(reservoir, coupling, field, settings)
        except SymmetryError:
            transfer = None
    pops = np.diagonal(rho).astype(complex).copy() if transfer is not None else None

    streak = 0
    for k in range(1, budget + 1):
        if transfer is not None:
            pops = transfer @ pops
            if not np.all(np.isfinite(pops)):
                raise DivergenceError("collision iteration produced non-finite populations")
            rho = np.diag(pops)
        else:
            rho = collision_step(rho, reservoir, coupling, field, settings)
        rec = _sample(rho, field.Omega)
        if rec[4] >= TAIL_ERROR_THRESHOLD:
            suggested = _suggest_dim(field.Omega, T_hot, field.dim)
            raise TruncationError(
                f"top-Fock leakage {rec[4]:.3g} at collision {k}; use dim >= {suggested}",
                suggested_dim=suggested,
            )
        records.append(rec)
        times.append(k * horizon)
        rel_change = abs(rec[0] - records[-2][0]) / max(abs(rec[0]), 1e-12)
        streak = streak + 1 if rel_change < STEADY_REL_EPS else 0
        if streak >= STEADY_STREAK:
            break

    columns = list(zip(*records))
    return TimeSeries(
        times=np.array(times),
        n_mean=np.array(columns[0]),
        T_field=np.array(columns[1]),
        g2=np.array(columns[2]),
        trace_dev=np.array(columns[3]),
        tail_leak=np.array(columns[4]),
        min_eig=np.array(columns[5]),
        herm_defect=np.array(columns[6]),
    )
