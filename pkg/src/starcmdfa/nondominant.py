"""Rank-1 solution and its optimality certificate for non-dominant models.

In the non-dominant regime the optimal decomposition keeps the star intact:
D_ii = 1 - alpha_i^2 and Sigma_t = alpha alpha^T.  The certificate matrix T
is built from an explicit null-space basis of Sigma_t, column-scaled so that
row i has squared norm 1/(1 - alpha_i^2).
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConstructionError, RegimeError
from .model import Regime, StarModel, classify

ROW_NORM_TOL = 1e-10


def choose_signs(theta) -> np.ndarray:
    """Pick signs s in {+-1}^(n-1) for theta_2..theta_n so that

        beta_nn = (theta_1^2 - sum theta_i^2) / ((sum s_i theta_i)^2 - sum theta_i^2)

    lands in [0, 1].  When theta_1^2 >= sum(theta_rest^2) the all-aligned
    choice works; otherwise the numerator is negative and a greedy balanced
    signing (each element opposing the running partial sum) makes the
    denominator negative with |sum s_i theta_i| <= theta_2 <= theta_1.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.size
    if n < 3:
        raise ConstructionError(
            "sign construction needs n >= 3; n = 2 only admits the "
            "single-column boundary certificate")
    rest = theta[1:]
    if theta[0] ** 2 >= np.sum(rest**2):
        signs = np.ones(n - 1)
    else:
        signs = np.empty(n - 1)
        running = 0.0
        for idx in np.argsort(-rest, kind="stable"):
            s = -1.0 if running > 0 else 1.0
            signs[idx] = s
            running += s * rest[idx]
        if (signs @ rest) ** 2 == np.sum(rest**2):
            # degenerate denominator; flip the smallest element's sign
            signs[np.argmin(rest)] *= -1.0
    b = beta_nn(theta, signs)
    if not -1e-12 <= b <= 1.0 + 1e-12:
        raise ConstructionError(f"no valid signing found (beta_nn={b})")
    return signs


def beta_nn(theta, signs) -> float:
    """Last diagonal entry of the column-scaling Gram matrix beta."""
    theta = np.asarray(theta, dtype=float)
    rest = theta[1:]
    ssq = float(np.sum(rest**2))
    den = float(signs @ rest) ** 2 - ssq
    if den == 0.0:
        raise ConstructionError("degenerate signing: zero denominator")
    return (float(theta[0]) ** 2 - ssq) / den


def null_basis(alpha, c) -> np.ndarray:
    """n x n matrix whose columns span the null space of alpha alpha^T.

    Columns 1..n-1 are the elementary vectors (-alpha_{j+1}/alpha_1 in row
    one, 1 in row j+1); the last column combines them with weights ``c``.
    """
    alpha = np.asarray(alpha, dtype=float)
    n = alpha.size
    V = np.zeros((n, n))
    V[0, : n - 1] = -alpha[1:] / alpha[0]
    V[np.arange(1, n), np.arange(n - 1)] = 1.0
    V[1:, n - 1] = c
    V[0, n - 1] = -(c @ alpha[1:]) / alpha[0]
    return V


def boundary_certificate(model: StarModel) -> np.ndarray:
    """Single-column certificate for the boundary case theta_1 = sum(rest).

    The null-space direction aligned with the SNR values is the only
    admissible one; its entries satisfy t_i^2 = 1/(1 - alpha_i^2).
    """
    alpha = model.alpha
    c = np.sign(alpha[1:]) / np.sqrt(1.0 - alpha[1:] ** 2)
    col = np.empty(model.n)
    col[1:] = c
    col[0] = -(c @ alpha[1:]) / alpha[0]
    return col[:, None]


def build_certificate(model: StarModel, signs=None) -> np.ndarray:
    """Full n-column certificate T = V B for an interior non-dominant model.

    B is diagonal with B_ii = sqrt(beta_ii), beta_ii = (1 - beta_nn) /
    (1 - alpha_{i+1}^2) for i < n.  Raises :class:`ConstructionError` if the
    resulting row norms miss their targets (a sign-choice bug).
    """
    alpha, theta = model.alpha, model.theta
    n = model.n
    if signs is None:
        signs = choose_signs(theta)
    b_nn = min(max(beta_nn(theta, signs), 0.0), 1.0)
    # c_i alpha_i = s_i theta_i  =>  c~_i = s_i * sign(alpha_i)
    c_tilde = np.asarray(signs, float) * np.sign(alpha[1:])
    c = c_tilde / np.sqrt(1.0 - alpha[1:] ** 2)
    beta = np.empty(n)
    beta[: n - 1] = (1.0 - b_nn) / (1.0 - alpha[1:] ** 2)
    beta[n - 1] = b_nn
    T = null_basis(alpha, c) * np.sqrt(beta)
    target = 1.0 / (1.0 - alpha**2)
    resid = np.abs(np.sum(T**2, axis=1) - target) / target
    if np.max(resid) > ROW_NORM_TOL:
        raise ConstructionError(
            f"certificate row norms off target (max rel residual {np.max(resid):.3e})")
    return T


def solve_nondominant(model: StarModel, boundary: bool | None = None):
    """Rank-1 decomposition: D_ii = 1 - alpha_i^2, Sigma_t = alpha alpha^T.

    Returns ``(d, sigma_t, rank, t)`` in the model's canonical order.  The
    certificate has n columns in the interior and a single column at the
    boundary (where the null space admitting valid row norms is
    one-dimensional).  Raises :class:`RegimeError` on dominant input.
    """
    cls = classify(model)
    if cls.regime is Regime.DOMINANT:
        raise RegimeError("rank-1 solver called on a dominant model")
    if boundary is None:
        boundary = cls.regime is Regime.BOUNDARY
    alpha = model.alpha
    d = 1.0 - alpha**2
    sigma_t = np.outer(alpha, alpha)
    if boundary or model.n == 2:
        t = boundary_certificate(model)
    else:
        t = build_certificate(model)
    return d, sigma_t, 1, t
