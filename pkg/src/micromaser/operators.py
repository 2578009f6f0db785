"""Operator builders on truncated bosonic and atomic spaces.

Basis conventions, relied on across the package and pinned by tests:

* two-level atoms: index 0 is the excited state ``|e>``, index 1 the ground
  state ``|g>``; hence ``sigma_plus = |e><g|`` has its single nonzero entry
  at (0, 1) and a thermal atom is the literal diagonal ``diag(p_e, p_g)``;
* multilevel atoms: index 0 is ``|e>``, indices 1..N the degenerate ground
  levels ``|g_1> .. |g_N>`` (all at zero energy);
* composite spaces order the atomic factor(s) first, the field last.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionLimitError, DomainError, ShapeError
from .linalg import HilbertSpec, as_spec, dagger, kron_all

#: Largest two-level cluster handled without an explicit override (2^N states).
ATOM_COUNT_CAP = 6

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
}


def _check_dim(dim: int) -> int:
    dim = int(dim)
    if dim < 2:
        raise DomainError(f"Fock truncation needs dim >= 2, got {dim}")
    return dim


def annihilation(dim: int) -> np.ndarray:
    """Truncated annihilation operator: <n-1|a|n> = sqrt(n)."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def creation(dim: int) -> np.ndarray:
    """Adjoint of :func:`annihilation`."""
    return dagger(annihilation(dim))


def number_op(dim: int) -> np.ndarray:
    """Photon number operator diag(0, 1, ..., dim-1)."""
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def basis_ket(dim: int, n: int) -> np.ndarray:
    """Fock state |n> as a 1-D unit vector."""
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise ShapeError(f"level {n} outside truncation of dim {dim}")
    ket = np.zeros(dim, dtype=complex)
    ket[n] = 1.0
    return ket


def projector(dim: int, n: int) -> np.ndarray:
    """Rank-one projector |n><n|."""
    ket = basis_ket(dim, n)
    return np.outer(ket, ket.conj())


def pauli(which: str) -> np.ndarray:
    """Pauli matrix by name: x, y, z, plus or minus (excited state first)."""
    try:
        return _PAULI[which].copy()
    except KeyError:
        raise DomainError(f"unknown Pauli label {which!r}") from None


def lift(op, spec, position: int) -> np.ndarray:
    """Embed a subsystem operator into the composite space.

    Identity acts on every other factor; the factor order of ``spec`` is
    atoms first, field last.
    """
    spec = as_spec(spec)
    op = np.asarray(op, dtype=complex)
    if not 0 <= position < len(spec.dims):
        raise ShapeError(f"position {position} outside spec {spec.dims}")
    if op.shape != (spec.dims[position], spec.dims[position]):
        raise ShapeError(
            f"operator shape {op.shape} does not match subsystem dim "
            f"{spec.dims[position]}"
        )
    factors = [
        op if i == position else np.eye(d, dtype=complex)
        for i, d in enumerate(spec.dims)
    ]
    return kron_all(factors)


def collective_spin(n_atoms: int, which: str, atom_cap: int = ATOM_COUNT_CAP) -> np.ndarray:
    """Collective operator of ``n_atoms`` two-level atoms (2^N x 2^N).

    ``z`` builds S_z = (1/2) sum_i sigma_z^i; ``plus``/``minus`` build
    S_pm = sum_i sigma_pm^i.  Each single-atom operator is embedded by
    identity padding.
    """
    n_atoms = int(n_atoms)
    if n_atoms < 1:
        raise DomainError(f"need at least one atom, got {n_atoms}")
    if n_atoms > atom_cap:
        raise DimensionLimitError(
            f"cluster of {n_atoms} atoms exceeds the cap of {atom_cap}"
        )
    if which == "z":
        single = 0.5 * pauli("z")
    elif which in ("plus", "minus"):
        single = pauli(which)
    else:
        raise DomainError(f"unknown collective-spin label {which!r}")
    spec = HilbertSpec((2,) * n_atoms)
    total = np.zeros((spec.total_dim, spec.total_dim), dtype=complex)
    for i in range(n_atoms):
        total += lift(single, spec, i)
    return total


def multilevel_transition(n_ground: int, which: str) -> np.ndarray:
    """Raising/lowering operator of an atom with N degenerate ground levels.

    R_plus = (1/sqrt(N)) sum_i |e><g_i| on the (N+1)-dimensional space with
    |e> at index 0; R_minus is its adjoint.
    """
    n_ground = int(n_ground)
    if n_ground < 1:
        raise DomainError(f"need at least one ground level, got {n_ground}")
    r_plus = np.zeros((n_ground + 1, n_ground + 1), dtype=complex)
    r_plus[0, 1:] = 1.0 / np.sqrt(n_ground)
    if which == "plus":
        return r_plus
    if which == "minus":
        return dagger(r_plus)
    raise DomainError(f"unknown multilevel transition label {which!r}")
