import numpy as np
import pytest


def crandn(rng, *shape):
    """Standard circular complex Gaussian array."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_hpd(rng, n, extra=0.0):
    """Random Hermitian positive definite matrix (Wishart-style)."""
    A = crandn(rng, n, n + 4)
    return A @ A.conj().T + extra * np.eye(n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
