"""Star model representation, covariance construction, and regime classification.

A star model couples n observables to a single latent factor through a
loading vector ``alpha`` with 0 < |alpha_j| < 1.  The induced correlation
matrix has unit diagonal and off-diagonal entries ``alpha_i * alpha_j``.
Everything downstream is driven by the per-variable SNR values
``theta_i = |alpha_i| / sqrt(1 - alpha_i**2)`` and by whether the largest
theta dominates the sum of the others.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DomainError

#: Relative margin below which a nominally dominant model is solved through
#: the rank-1 boundary path (the dominant bracket blows up as margin -> 0).
NEAR_BOUNDARY_RATIO = 1e-6


class Regime(Enum):
    NON_DOMINANT = "non-dominant"
    BOUNDARY = "boundary"
    DOMINANT = "dominant"


def snr_from_loadings(alpha):
    """theta_i = |alpha_i| / sqrt(1 - alpha_i^2), elementwise."""
    alpha = np.asarray(alpha, dtype=float)
    return np.abs(alpha) / np.sqrt(1.0 - alpha**2)


def loadings_from_snr(theta):
    """Inverse of :func:`snr_from_loadings` on positive loadings."""
    theta = np.asarray(theta, dtype=float)
    return theta / np.sqrt(1.0 + theta**2)


@dataclass(frozen=True)
class StarModel:
    """Loading vector in canonical (descending |alpha|) order.

    ``perm`` maps canonical positions to the caller's positions:
    ``user_alpha[perm[k]] == alpha[k]``.  ``signs`` records the sign of each
    canonical loading; signs are preserved by canonicalization, never
    flipped.
    """

    alpha: np.ndarray
    theta: np.ndarray
    perm: np.ndarray
    signs: np.ndarray

    @property
    def n(self) -> int:
        return int(self.alpha.size)

    @property
    def user_alpha(self) -> np.ndarray:
        """Loadings in the caller's original order."""
        out = np.empty_like(self.alpha)
        out[self.perm] = self.alpha
        return out

    def to_user_order(self, values: np.ndarray) -> np.ndarray:
        """Map a canonical-order vector back to the caller's order."""
        out = np.empty_like(np.asarray(values, dtype=float))
        out[self.perm] = values
        return out


@dataclass(frozen=True)
class StarCovariance:
    """The n x n star correlation matrix together with its loadings."""

    alpha: np.ndarray
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.alpha.size)

    def log_det(self) -> float:
        """log|Sigma_x| via the rank-one determinant update:
        prod(1 - alpha_i^2) * (1 + sum theta_i^2)."""
        a2 = self.alpha**2
        return float(np.sum(np.log1p(-a2)) + np.log1p(np.sum(a2 / (1.0 - a2))))

    def det(self) -> float:
        return float(np.exp(self.log_det()))


@dataclass(frozen=True)
class DominanceClass:
    """Dominance classification with the raw margin theta_1 - sum(theta_rest)."""

    regime: Regime
    margin: float


@dataclass(frozen=True)
class CmdfaSolution:
    """Minimum-determinant decomposition Sigma_x = Sigma_t + D, in the
    caller's index order.

    ``t`` holds the optimality certificate: its columns lie in the null
    space of ``sigma_t`` and its i-th row has squared norm 1/d_i.  The
    dominant-regime extras (``x1_star``, ``mu_sq``, ``a``) are None for
    rank-1 solutions.
    """

    d: np.ndarray
    sigma_t: np.ndarray
    rank: int
    t: np.ndarray
    regime: Regime
    margin: float
    x1_star: float | None = None
    mu_sq: float | None = None
    a: np.ndarray | None = None


def canonicalize(raw_alpha) -> StarModel:
    """Validate a loading vector and sort it by descending magnitude.

    Ties are broken by original index (stable sort).  Raises
    :class:`DomainError` if any |alpha_j| is 0 or >= 1, or if n < 2.
    """
    alpha = np.atleast_1d(np.asarray(raw_alpha, dtype=float)).ravel()
    if alpha.size < 2:
        raise DomainError(f"need at least 2 loadings, got {alpha.size}")
    mag = np.abs(alpha)
    if not np.all((mag > 0.0) & (mag < 1.0)):
        raise DomainError("every loading must satisfy 0 < |alpha_j| < 1")
    perm = np.argsort(-mag, kind="stable")
    srt = alpha[perm]
    return StarModel(
        alpha=srt,
        theta=snr_from_loadings(srt),
        perm=perm,
        signs=np.sign(srt),
    )


def build_covariance(model) -> StarCovariance:
    """Star correlation matrix: unit diagonal, alpha_i*alpha_j off-diagonal.

    Accepts a :class:`StarModel` (canonical order) or a raw loading vector
    (kept in the given order).
    """
    alpha = model.alpha if isinstance(model, StarModel) else np.asarray(model, float)
    matrix = np.outer(alpha, alpha)
    np.fill_diagonal(matrix, 1.0)
    return StarCovariance(alpha=alpha.copy(), matrix=matrix)


def classify(model: StarModel, eps_class: float | None = None) -> DominanceClass:
    """Classify the SNR vector as non-dominant, boundary, or dominant.

    The margin is theta_1 - sum(theta_2..theta_n); the boundary band is
    ``eps_class`` wide (default 1e-12 * max(1, theta_1)).
    """
    theta = model.theta
    margin = float(theta[0] - theta[1:].sum())
    if eps_class is None:
        eps_class = 1e-12 * max(1.0, float(theta[0]))
    elif eps_class <= 0:
        raise DomainError("eps_class must be positive")
    if margin < -eps_class:
        regime = Regime.NON_DOMINANT
    elif margin > eps_class:
        regime = Regime.DOMINANT
    else:
        regime = Regime.BOUNDARY
    return DominanceClass(regime=regime, margin=margin)


def solve(model: StarModel, tol: float = 1e-12,
          eps_class: float | None = None) -> CmdfaSolution:
    """Compute the minimum-determinant decomposition of the star covariance.

    Dispatches on the dominance regime: non-dominant and boundary models get
    the exact rank-1 solution, strictly dominant models the rank n-1
    solution.  Results are reported in the caller's original index order.
    """
    from . import dominant, nondominant  # local import to avoid a cycle

    cls = classify(model, eps_class)
    regime = cls.regime
    if (regime is Regime.DOMINANT
            and cls.margin / model.theta[0] < NEAR_BOUNDARY_RATIO):
        # Too close to the boundary for the dominant bracket; the rank-1
        # solution is the correct limit.
        regime = Regime.BOUNDARY

    x1_star = mu_sq = a_user = None
    if regime is Regime.DOMINANT:
        d, sigma_t, rank, t, aux = dominant.solve_dominant(model, tol=tol)
        x1_star, mu_sq = aux.x1_star, aux.mu_sq
        a_user = model.to_user_order(aux.a)
    else:
        d, sigma_t, rank, t = nondominant.solve_nondominant(
            model, boundary=regime is Regime.BOUNDARY)

    perm = model.perm
    n = model.n
    d_user = model.to_user_order(d)
    st_user = np.empty_like(sigma_t)
    st_user[np.ix_(perm, perm)] = sigma_t
    t_user = np.empty_like(t)
    t_user[perm, :] = t
    return CmdfaSolution(
        d=d_user, sigma_t=st_user, rank=rank, t=t_user,
        regime=regime, margin=cls.margin,
        x1_star=x1_star, mu_sq=mu_sq, a=a_user,
    )
