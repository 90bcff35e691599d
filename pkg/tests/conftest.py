import numpy as np
import pytest

from broadcastkit.core.channels import BroadcastChannel
from broadcastkit.core.densops import random_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_channel(rng):
    """Factory for Haar-random channels with a Dirichlet ancilla spectrum."""

    def make(ancilla_dim: int = 4, copies: int = 2) -> BroadcastChannel:
        unitary = random_unitary(2 * ancilla_dim, rng)
        spectrum = rng.dirichlet(np.ones(ancilla_dim))
        spectrum = spectrum / spectrum.sum()
        return BroadcastChannel(unitary, spectrum, copies)

    return make


@pytest.fixture
def swap_channel():
    """Swaps the system qubit with the first ancilla qubit; copy 0 always ends in |0>."""
    perm = np.zeros((8, 8), dtype=complex)
    for index in range(8):
        b0, b1, b2 = (index >> 2) & 1, (index >> 1) & 1, index & 1
        perm[(b1 << 2) | (b0 << 1) | b2, index] = 1.0
    return BroadcastChannel(perm, [1.0, 0.0, 0.0, 0.0], copies=2)
