"""Dense complex linear algebra used by every other module.

States, operators and generators are plain ``numpy.ndarray`` objects with
``complex128`` entries in row-major storage.  Everything here is a pure
function of its inputs; nothing mutates an argument.  Dense storage is
deliberate: after tensor products the operators at the scales this package
targets (total dimension of a few hundred) have no useful sparsity left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg

from .errors import DimensionLimitError, DomainError, ShapeError, SymmetryError

#: Refuse tensor products whose result would exceed this many entries.
#: Guards against accidental 2**N blowups for large atom clusters.
DEFAULT_ENTRY_CAP = 2**20

#: Density-matrix acceptance tolerances.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-9


@dataclass(frozen=True)
class HilbertSpec:
    """Ordered subsystem dimensions of a tensor-product space.

    The ordering convention throughout the package is atoms first, field
    last, so a joint state factorizes as ``rho_atoms (x) rho_field``.
    """

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims or any(d < 2 for d in dims):
            raise ShapeError(f"subsystem dimensions must all be >= 2, got {dims}")

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)


def as_spec(spec) -> HilbertSpec:
    """Coerce a HilbertSpec or a plain sequence of dimensions."""
    if isinstance(spec, HilbertSpec):
        return spec
    return HilbertSpec(tuple(spec))


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a matrix, got array with ndim={m.ndim}")
    return m


def _as_square(m) -> np.ndarray:
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(m) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(_as_matrix(m)).T


def kron(a, b, entry_cap: int = DEFAULT_ENTRY_CAP) -> np.ndarray:
    """Kronecker product ``a (x) b`` with a configurable size cap.

    Entry ``(i*b.rows + k, j*b.cols + l)`` of the result equals
    ``a[i, j] * b[k, l]``.
    """
    a = _as_matrix(a)
    b = _as_matrix(b)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise DomainError("kron operands must be finite-valued")
    entries = (a.shape[0] * b.shape[0]) * (a.shape[1] * b.shape[1])
    if entries > entry_cap:
        raise DimensionLimitError(
            f"tensor product would hold {entries} entries, above the cap {entry_cap}"
        )
    return np.kron(a, b)


def kron_all(mats, entry_cap: int = DEFAULT_ENTRY_CAP) -> np.ndarray:
    """Left-associated Kronecker product of a non-empty sequence."""
    mats = list(mats)
    if not mats:
        raise ShapeError("kron_all needs at least one operand")
    return reduce(lambda x, y: kron(x, y, entry_cap), mats)


def partial_trace(rho, spec, keep: int) -> np.ndarray:
    """Trace out every subsystem except ``keep``.

    ``rho`` must act on the full space described by ``spec``; the result is
    the ``dims[keep] x dims[keep]`` reduced operator.  Equivalent to the
    explicit multi-index sum rho_kept[i, j] = sum_m rho[(i, m), (j, m)].
    """
    spec = as_spec(spec)
    rho = _as_square(rho)
    dims = spec.dims
    if rho.shape[0] != spec.total_dim:
        raise ShapeError(
            f"state has dimension {rho.shape[0]}, spec expects {spec.total_dim}"
        )
    n = len(dims)
    if not 0 <= keep < n:
        raise ShapeError(f"keep={keep} does not index a subsystem of {dims}")
    t = rho.reshape(dims + dims)
    m = n
    for ax in sorted((i for i in range(n) if i != keep), reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + m)
        m -= 1
    return t


def expm(m) -> np.ndarray:
    """Matrix exponential (convergent power series sum_k m^k / k!).

    Delegates to scipy's scaling-and-squaring Pade implementation; the
    contract is the series semantics, and anti-Hermitian inputs map to
    unitaries.
    """
    m = _as_square(m)
    if not np.all(np.isfinite(m)):
        raise DomainError("expm input must be finite-valued")
    return scipy.linalg.expm(m)


def hermiticity_defect(m) -> float:
    """Max elementwise |m - m^dagger|."""
    m = _as_square(m)
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def hermitian_eigenvalues(m, tol: float = 1e-10) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    m = _as_square(m)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise SymmetryError(f"matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})")
    return np.linalg.eigvalsh(m)


def check_density_matrix(
    rho,
    hermiticity_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    eigenvalue_floor: float = EIGENVALUE_FLOOR,
) -> np.ndarray:
    """Validate the density-matrix invariants and return the coerced array.

    Hermitian to ``hermiticity_tol``, unit trace to ``trace_tol`` and minimum
    eigenvalue above ``eigenvalue_floor``.
    """
    rho = _as_square(rho)
    defect = hermiticity_defect(rho)
    if defect > hermiticity_tol:
        raise SymmetryError(f"density matrix not Hermitian (defect {defect:.3e})")
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > trace_tol:
        raise DomainError(f"density matrix trace {trace} deviates from 1")
    lowest = float(np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0])
    if lowest < eigenvalue_floor:
        raise DomainError(f"density matrix has eigenvalue {lowest:.3e} below the floor")
    return rho
