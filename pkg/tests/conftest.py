import numpy as np
import pytest

from steercert.families import CholeskyParams
from steercert.linalg import DensityMatrix, Tolerances


@pytest.fixture
def tol():
    return Tolerances()


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_pure(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return m + m.conj().T


def random_psd(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return g @ g.conj().T


def random_density(rng: np.random.Generator, dims: tuple[int, int]) -> DensityMatrix:
    n = dims[0] * dims[1]
    m = random_psd(rng, n)
    return DensityMatrix(m / m.trace().real, dims)


def sample_cholesky(rng: np.random.Generator, zero_z: bool = False) -> CholeskyParams:
    a, b, c = np.abs(rng.normal(size=3)) + 1e-3
    x, y, z = rng.normal(size=3) + 1j * rng.normal(size=3)
    return CholeskyParams(a, b, c, x, y, 0j if zero_z else z)


def rank_two_state(rng: np.random.Generator) -> DensityMatrix:
    p1 = random_pure(rng, 4)
    p2 = random_pure(rng, 4)
    w = rng.uniform(0.05, 0.95)
    m = w * np.outer(p1, p1.conj()) + (1 - w) * np.outer(p2, p2.conj())
    return DensityMatrix(m, (2, 2))
