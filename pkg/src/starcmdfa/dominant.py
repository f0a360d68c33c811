"""Rank n-1 solution for strictly dominant models.

The stationarity system reduces to a single scalar equation: find X_1 > 1/2
with G(X_1) = 1 + sum(theta^2)/2, where G couples X_1 to the remaining
coordinates through a family of hyperbolas sharing the vertex X_i = 1/2.
G is increasing on a provable bracket [x1_low, x1_up], so bisection (plus a
Newton polish) is unconditionally convergent.  The diagonal entries a_i of
the low-rank part then follow in closed form and are cross-validated
against the quadratic they must solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, DomainError, NumericalError, RegimeError
from .model import Regime, StarModel, classify

QUADRATIC_AGREEMENT_TOL = 1e-10
STATIONARITY_TOL = 1e-8
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class Bounds:
    """Bracket for the stationary point X_1*."""

    x1_low: float
    x1_up: float


@dataclass(frozen=True)
class DominantAux:
    """Stationary-point data for the rank n-1 solution (canonical order)."""

    x1_star: float
    x: np.ndarray
    mu_sq: float
    eta: np.ndarray
    a: np.ndarray
    c: np.ndarray


def x_profile(x1: float, theta) -> np.ndarray:
    """Coordinates [X_1, X_2(X_1), ..., X_n(X_1)] on the hyperbola family

        theta_1^2 X_1^2 - theta_i^2 X_i^2 = (theta_1^2 - theta_i^2)/4,

    positive branch.  All X_i >= 1/2, with equality iff x1 = 1/2.
    """
    if x1 < 0.5:
        raise DomainError(f"x1 must be >= 1/2, got {x1}")
    theta = np.asarray(theta, dtype=float)
    X = np.empty(theta.size)
    X[0] = x1
    X[1:] = np.sqrt(0.25 + (theta[0] ** 2 / theta[1:] ** 2) * (x1**2 - 0.25))
    return X


def g_value(x1: float, theta) -> float:
    """G(x1) = theta_1^2 x1 - sum_{i>=2} theta_i^2 X_i(x1)."""
    theta = np.asarray(theta, dtype=float)
    X = x_profile(x1, theta)
    return float(theta[0] ** 2 * x1 - theta[1:] ** 2 @ X[1:])


def g_target(theta) -> float:
    """Right-hand side 1 + sum(theta^2)/2 of the stationarity equation."""
    theta = np.asarray(theta, dtype=float)
    return 1.0 + 0.5 * float(np.sum(theta**2))


def g_derivative(x1: float, theta) -> float:
    """dG/dx1 = theta_1^2 (1 - x1 * sum_{i>=2} 1/X_i)."""
    theta = np.asarray(theta, dtype=float)
    X = x_profile(x1, theta)
    return float(theta[0] ** 2 * (1.0 - x1 * np.sum(1.0 / X[1:])))


def bounds(theta) -> Bounds:
    """Analytic bracket [x1_low, x1_up] for the root of G = target.

    Only defined for strictly dominant theta; both expressions diverge as
    the margin approaches zero.
    """
    theta = np.asarray(theta, dtype=float)
    margin = float(theta[0] - theta[1:].sum())
    if margin <= 0.0:
        raise RegimeError("bounds are defined only for strictly dominant models")
    denom = float(theta[0]) * margin
    x1_up = g_target(theta) / denom
    x1_low = 0.5 + (1.0 + 0.5 * float(np.sum(theta[1:] ** 2))) / denom
    return Bounds(x1_low=x1_low, x1_up=x1_up)


def solve_x1(theta, tol: float = 1e-12) -> float:
    """Root X_1* of G(X_1) = 1 + sum(theta^2)/2 on the analytic bracket.

    Bisection to relative tolerance ``tol``, finished with a few Newton
    steps.  Raises :class:`ConvergenceError` if the bracket endpoints fail
    to straddle the target (which would indicate a misclassified model).
    """
    theta = np.asarray(theta, dtype=float)
    if tol <= 0:
        raise DomainError("tol must be positive")
    b = bounds(theta)
    target = g_target(theta)
    lo, hi = b.x1_low, b.x1_up
    flo = g_value(lo, theta) - target
    fhi = g_value(hi, theta) - target
    slack = 1e-12 * max(1.0, abs(target))
    if flo > slack or fhi < -slack:
        raise ConvergenceError(
            f"bracket does not straddle the target: G-f at ends ({flo}, {fhi})")
    if flo >= 0.0:
        return lo
    if fhi <= 0.0:
        return hi
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if g_value(mid, theta) - target <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(hi)):
            break
    x = 0.5 * (lo + hi)
    for _ in range(4):
        f = g_value(x, theta) - target
        df = g_derivative(x, theta)
        if df <= 0.0:
            break
        step = f / df
        x_new = min(max(x - step, b.x1_low), b.x1_up)
        if x_new == x:
            break
        x = x_new
    return x


def _a_from_quadratic(alpha, mu_sq) -> np.ndarray:
    """Roots of a^2 + a alpha^2 (mu^2 - 2) + alpha^2 (alpha^2 - mu^2) = 0:
    left root for the first entry, right roots for the rest."""
    alpha = np.asarray(alpha, dtype=float)
    a2 = alpha**2
    B = a2 * (mu_sq - 2.0)
    disc = B**2 - 4.0 * a2 * (a2 - mu_sq)
    root = np.sqrt(np.maximum(disc, 0.0))
    out = (-B + root) / 2.0
    out[0] = (-B[0] - root[0]) / 2.0
    return out


def recover_a(model: StarModel, x1_star: float, validate: bool = True) -> DominantAux:
    """Diagonal of the low-rank part from the stationary point X_1*.

    Closed form: a_1 = alpha_1^2 (1 - mu^2 (X_1 + 1/2)) and
    a_i = alpha_i^2 (1 + mu^2 (X_i - 1/2)) for i >= 2, with
    mu^2 = 1/(theta_1^2 (X_1^2 - 1/4)).  With ``validate`` the values are
    checked against the quadratic roots and the stationarity identity
    sum 1/(1 - a_i/alpha_i^2) = 1; surrogate evaluations at the bracket
    endpoints skip those checks.
    """
    alpha, theta = model.alpha, model.theta
    X = x_profile(x1_star, theta)
    mu_sq = 1.0 / (theta[0] ** 2 * (x1_star**2 - 0.25))
    a = np.empty(model.n)
    a[0] = alpha[0] ** 2 * (1.0 - mu_sq * (X[0] + 0.5))
    a[1:] = alpha[1:] ** 2 * (1.0 + mu_sq * (X[1:] - 0.5))
    if np.any((a <= 0.0) | (a >= 1.0)):
        raise NumericalError(f"recovered diagonal outside (0,1): {a}")
    if validate:
        aq = _a_from_quadratic(alpha, mu_sq)
        rel = np.max(np.abs(a - aq) / np.maximum(np.abs(a), 1e-300))
        if rel > QUADRATIC_AGREEMENT_TOL:
            raise NumericalError(
                f"closed-form and quadratic-root diagonals disagree ({rel:.3e})")
        terms = 1.0 / (1.0 - a / alpha**2)
        resid = abs(float(np.sum(terms)) - 1.0)
        # the sum is ill-conditioned near the dominance boundary, where the
        # individual terms blow up while cancelling; budget for that
        cond = max(1.0, float(np.max(np.abs(terms))))
        if resid > STATIONARITY_TOL * cond:
            raise NumericalError(f"stationarity residual {resid:.3e} too large")
    eta = (a - alpha**2) / np.sqrt(1.0 - a)
    c = np.where(alpha / eta >= 0.0, 1.0, -1.0)  # mu fixed positive
    return DominantAux(x1_star=float(x1_star), x=X, mu_sq=float(mu_sq),
                       eta=eta, a=a, c=c)


def solve_dominant(model: StarModel, tol: float = 1e-12):
    """Rank n-1 decomposition for a strictly dominant model.

    Returns ``(d, sigma_t, rank, t, aux)`` in canonical order, where
    d_i = 1 - a_i and the single-column certificate t_i = c_i/sqrt(1 - a_i)
    spans the null space of Sigma_t.
    """
    cls = classify(model)
    if cls.regime is not Regime.DOMINANT:
        raise RegimeError("rank n-1 solver called on a non-dominant model")
    x1_star = solve_x1(model.theta, tol=tol)
    aux = recover_a(model, x1_star)
    d = 1.0 - aux.a
    sigma_t = np.outer(model.alpha, model.alpha)
    np.fill_diagonal(sigma_t, aux.a)
    t = (aux.c / np.sqrt(1.0 - aux.a))[:, None]
    return d, sigma_t, model.n - 1, t, aux
