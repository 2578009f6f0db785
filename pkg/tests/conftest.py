import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_density(rng, dim: int) -> np.ndarray:
    """Random full-rank density matrix (Haar-ish mixture)."""
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def random_matrix(rng, dim: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
