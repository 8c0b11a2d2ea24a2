import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def bob_marginal(matrix: np.ndarray) -> np.ndarray:
    """Trace out Alice (first tensor factor) from a 4x4 pair operator."""
    m = np.asarray(matrix).reshape(2, 2, 2, 2)
    return m[0, :, 0, :] + m[1, :, 1, :]


def alice_marginal(matrix: np.ndarray) -> np.ndarray:
    """Trace out Bob (second tensor factor) from a 4x4 pair operator."""
    m = np.asarray(matrix).reshape(2, 2, 2, 2)
    return m[:, 0, :, 0] + m[:, 1, :, 1]
