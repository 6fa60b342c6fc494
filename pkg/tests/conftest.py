import numpy as np
import pytest

from invspec import Order, PotentialCoefficients, SpectralData


def random_potential(order: Order, n_max: int, rng, scale: float = 0.05) -> PotentialCoefficients:
    """Random coefficients with |p_{gamma n}| <= scale * 2^-n."""
    shape = (order.gamma_count, n_max)
    raw = rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)
    cap = scale * 2.0 ** -np.arange(1, n_max + 1)
    return PotentialCoefficients(order, n_max, raw / np.sqrt(2.0) * cap[None, :])


def random_spectral(order: Order, n_max: int, rng, scale: float = 0.01) -> SpectralData:
    """Random spectral data with |S_{nj}| <= scale * 2^-n."""
    shape = (n_max, order.j_count)
    raw = rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)
    cap = scale * 2.0 ** -np.arange(1, n_max + 1)
    return SpectralData(order, n_max, raw / np.sqrt(2.0) * cap[:, None])


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
