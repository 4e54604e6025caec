"""
Shared fixtures for the simulator tests
"""

import numpy as np
import pytest

from quantum import CslParams, HermitianOperator, StateVector, SubsystemLayout


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def qubit():
    return SubsystemLayout((2,))


@pytest.fixture
def two_branch(qubit):
    """sqrt(0.3)|0> + sqrt(0.7)|1> against diag(0, 1) at lambda = 1."""
    psi0 = StateVector.from_amplitudes([np.sqrt(0.3), np.sqrt(0.7)], qubit)
    params = CslParams(1.0, HermitianOperator.diagonal([0.0, 1.0], qubit))
    return psi0, params


def random_state(layout, rng):
    amps = rng.normal(size=layout.total_dim) + 1j * rng.normal(size=layout.total_dim)
    return StateVector.from_amplitudes(amps, layout)


def random_hermitian(dim, rng):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (m + m.conj().T)


def random_unitary(dim, rng):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))
