"""Shared fixtures and random-object helpers.

Random rate profiles are bounded (rates in [0.05, 0.8]) so the fixed-step
RK4 oracle stays orders of magnitude inside the 1e-6 dual-route comparison
budget at the times the tests use.
"""

import numpy as np
import pytest

from aqec import RateProfile

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def profile3():
    return RateProfile(n=3, gamma=(0.2, 0.2, 1.0))


@pytest.fixture
def profile4():
    return RateProfile(n=4, gamma=(0.2, 0.3, 0.1, 2.0))


def random_profile(n: int, tag: int, kind: str = "dephasing") -> RateProfile:
    rng = np.random.default_rng([771, n, tag])
    gamma = tuple(rng.uniform(0.05, 0.8, size=n).tolist())
    return RateProfile(n=n, gamma=gamma, kind=kind)


def random_hermitian(d: int, rng, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (a + a.conj().T) / 2.0


def random_density(d: int, rng) -> np.ndarray:
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def hadamard_all(n: int) -> np.ndarray:
    w = HADAMARD
    for _ in range(n - 1):
        w = np.kron(w, HADAMARD)
    return w
