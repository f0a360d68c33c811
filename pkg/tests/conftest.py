import numpy as np
import pytest

from starcmdfa import canonicalize, loadings_from_snr


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_nondominant_model(rng, n):
    """Random strictly non-dominant model of dimension n."""
    rest = np.sort(rng.uniform(0.1, 1.2, n - 1))[::-1]
    theta1 = max(rest.sum() * rng.uniform(0.3, 0.98), rest[0] * 1.001)
    theta = np.concatenate(([theta1], rest))
    theta = np.sort(theta)[::-1]
    return canonicalize(loadings_from_snr(theta))


def random_dominant_model(rng, n, margin_factor=(1.2, 2.5)):
    """Random strictly dominant model of dimension n."""
    rest = np.sort(rng.uniform(0.15, 0.6, n - 1))[::-1]
    theta1 = rest.sum() * rng.uniform(*margin_factor)
    theta = np.concatenate(([theta1], rest))
    return canonicalize(loadings_from_snr(theta))


def random_model(rng, n):
    if rng.random() < 0.5:
        return random_nondominant_model(rng, n)
    return random_dominant_model(rng, n)
