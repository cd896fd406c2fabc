import numpy as np
import pytest

from ghzfreq.channel import NoiseParams


@pytest.fixture
def paper_params() -> NoiseParams:
    """Reference configuration used throughout: omega=1, T=200,
    gamma0=1e-4, lambda=5 (weak decay, moderate memory)."""
    return NoiseParams(omega=1.0, temperature=200.0, gamma0=1e-4, lam=5.0)


@pytest.fixture
def figure_params() -> NoiseParams:
    """Same bath but gamma0=5e-4, the decay strength that reproduces the
    published scaling shapes (see tests/test_acceptance.py)."""
    return NoiseParams(omega=1.0, temperature=200.0, gamma0=5e-4, lam=5.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)


def random_qubit_state(rng: np.random.Generator) -> np.ndarray:
    """Random mixed single-qubit density matrix (Bloch ball, uniform-ish)."""
    v = rng.normal(size=3)
    norm = np.linalg.norm(v)
    v *= rng.uniform(0.0, 1.0) / max(norm, 1e-12)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return 0.5 * (np.eye(2, dtype=complex) + v[0] * sx + v[1] * sy + v[2] * sz)
