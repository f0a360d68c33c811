"""Synthetic sampling from the latent star model and loading estimation.

Sampling draws x = alpha * y + z with y standard normal and z_j independent
zero-mean normals of variance 1 - alpha_j^2, so the population covariance
of the generator is exactly the star correlation matrix.  Estimation
inverts the star structure of a unit-diagonal matrix via a median of
triple ratios C_ij C_ik / C_jk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .model import StarModel, build_covariance, canonicalize

CLAMP_EPS = 1e-9


@dataclass(frozen=True)
class SampleBatch:
    """m observations of the n-dimensional star model, in the caller's
    original variable order.  ``latent`` holds the common-factor draws."""

    n: int
    m: int
    seed: int
    samples: np.ndarray
    latent: np.ndarray

    def to_csv(self, path) -> None:
        """One row per observation, comma-separated, no header or index."""
        np.savetxt(path, self.samples, delimiter=",", fmt="%.17g")


def sample(model: StarModel, m: int, seed: int = 0) -> SampleBatch:
    """Draw ``m`` observations; deterministic for a fixed seed."""
    if m < 1:
        raise DomainError("sample count must be >= 1")
    alpha = model.user_alpha
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(m)
    z = rng.standard_normal((m, model.n)) * np.sqrt(1.0 - alpha**2)
    x = y[:, None] * alpha + z
    return SampleBatch(n=model.n, m=int(m), seed=int(seed), samples=x, latent=y)


def correlation_from_samples(samples) -> np.ndarray:
    """Empirical correlation matrix with an exactly unit diagonal."""
    C = np.corrcoef(np.asarray(samples, dtype=float), rowvar=False)
    np.fill_diagonal(C, 1.0)
    return C


def estimate_alpha(C) -> tuple[StarModel, float]:
    """Recover the loading vector from a unit-diagonal star-like matrix.

    alpha_i^2 is the median over pairs (j, k), j != k, both != i, of
    C_ij * C_ik / C_jk; signs are fixed by alpha_1 > 0 and
    sign(alpha_i) = sign(C_1i).  Magnitudes are clamped into
    (CLAMP_EPS, 1 - CLAMP_EPS).  Returns the canonicalized model and the
    maximum off-diagonal misfit |C - Sigma_x(alpha_hat)|.

    Requires n >= 3: with two variables only the product alpha_1*alpha_2
    is identifiable.
    """
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    if C.ndim != 2 or C.shape != (n, n):
        raise DomainError("input must be a square matrix")
    if n < 3:
        raise DomainError("estimation needs n >= 3 (n = 2 is unidentifiable)")
    if not np.allclose(C, C.T, atol=1e-8):
        raise DomainError("input matrix must be symmetric")
    if not np.allclose(np.diag(C), 1.0, atol=1e-8):
        raise DomainError("input matrix must have a unit diagonal")
    off = C[~np.eye(n, dtype=bool)]
    if np.any(off == 0.0):
        raise DomainError("zero off-diagonal entry: star loadings unidentifiable")

    alpha_sq = np.empty(n)
    for i in range(n):
        others = [j for j in range(n) if j != i]
        vals = [C[i, j] * C[i, k] / C[j, k]
                for idx, j in enumerate(others) for k in others[idx + 1:]]
        alpha_sq[i] = np.median(vals)
    mag = np.clip(np.sqrt(np.clip(alpha_sq, 0.0, None)),
                  CLAMP_EPS, 1.0 - CLAMP_EPS)
    signs = np.ones(n)
    signs[1:] = np.sign(C[0, 1:])
    alpha_hat = mag * signs
    fitted = build_covariance(alpha_hat).matrix
    mask = ~np.eye(n, dtype=bool)
    residual = float(np.max(np.abs(C - fitted)[mask]))
    return canonicalize(alpha_hat), residual
