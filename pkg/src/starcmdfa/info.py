"""Mutual-information accounting for star decompositions.

For a decomposition Sigma_x = Sigma_t + D the mutual information between
the observables and the latent factors is I = log(|Sigma_x| / prod(D_ii))/2
in nats.  Besides the star and minimum-determinant values we evaluate the
surrogate decompositions obtained at the analytic bracket endpoints, which
bound how much the exact solution can improve on the star.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dominant
from .exceptions import DomainError
from .model import (NEAR_BOUNDARY_RATIO, Regime, StarCovariance, StarModel,
                    build_covariance, canonicalize, classify,
                    loadings_from_snr, solve)

LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class MiReport:
    """Mutual-information summary (all values in nats)."""

    i_star: float
    i_cmdfa: float
    i_up: float
    i_low: float
    gaps: tuple[float, float, float]  # star minus (cmdfa, up, low)
    regime: Regime


@dataclass(frozen=True)
class SweepRow:
    theta1: float
    margin: float
    i_star: float
    i_cmdfa: float
    i_up: float
    i_low: float
    flagged: bool = False


def mutual_info(sigma_x: StarCovariance, d) -> float:
    """I = log(|Sigma_x| / prod(d_i)) / 2 in nats.

    |Sigma_x| comes from the rank-one determinant identity, not an
    eigendecomposition.
    """
    d = np.asarray(d, dtype=float).ravel()
    if np.any(d <= 0.0):
        raise DomainError("diagonal entries must be positive")
    return 0.5 * (sigma_x.log_det() - float(np.sum(np.log(d))))


def mi_report(model: StarModel, tol: float = 1e-12) -> MiReport:
    """Full mutual-information report for one model.

    In the non-dominant and boundary regimes the star decomposition is
    optimal and all four values coincide.  In the dominant regime the
    bracket endpoints are pushed through the diagonal-recovery map to get
    the bound surrogates.
    """
    cov = build_covariance(model)
    a2 = model.alpha**2
    i_star = 0.5 * float(np.log1p(np.sum(a2 / (1.0 - a2))))
    sol = solve(model, tol=tol)
    if sol.regime is Regime.DOMINANT:
        i_cmdfa = mutual_info(cov, sol.d)
        b = dominant.bounds(model.theta)
        aux_up = dominant.recover_a(model, b.x1_up, validate=False)
        aux_low = dominant.recover_a(model, b.x1_low, validate=False)
        i_up = mutual_info(cov, 1.0 - aux_up.a)
        i_low = mutual_info(cov, 1.0 - aux_low.a)
    else:
        i_cmdfa = i_up = i_low = i_star
    return MiReport(
        i_star=i_star, i_cmdfa=i_cmdfa, i_up=i_up, i_low=i_low,
        gaps=(i_star - i_cmdfa, i_star - i_up, i_star - i_low),
        regime=sol.regime,
    )


def sweep_theta1(theta_rest, theta1_grid, tol: float = 1e-12) -> list[SweepRow]:
    """Evaluate :func:`mi_report` along a grid of leading SNR values.

    ``theta_rest`` holds the fixed SNRs of variables 2..n.  Grid points that
    are not strictly dominant with respect to them are flagged (MI columns
    NaN) rather than fatal.  Rows come back ordered by theta1.
    """
    rest = np.sort(np.asarray(theta_rest, dtype=float))[::-1]
    if np.any(rest <= 0.0):
        raise DomainError("theta_rest entries must be positive")
    rest_sum = float(rest.sum())
    rows = []
    for theta1 in sorted(float(t) for t in np.asarray(theta1_grid, float).ravel()):
        margin = theta1 - rest_sum
        if theta1 <= rest[0] or margin / theta1 < NEAR_BOUNDARY_RATIO:
            rows.append(SweepRow(theta1=theta1, margin=margin,
                                 i_star=float("nan"), i_cmdfa=float("nan"),
                                 i_up=float("nan"), i_low=float("nan"),
                                 flagged=True))
            continue
        theta = np.concatenate(([theta1], rest))
        model = canonicalize(loadings_from_snr(theta))
        cls = classify(model)
        if cls.regime is not Regime.DOMINANT:
            rows.append(SweepRow(theta1=theta1, margin=margin,
                                 i_star=float("nan"), i_cmdfa=float("nan"),
                                 i_up=float("nan"), i_low=float("nan"),
                                 flagged=True))
            continue
        rep = mi_report(model, tol=tol)
        rows.append(SweepRow(theta1=theta1, margin=cls.margin,
                             i_star=rep.i_star, i_cmdfa=rep.i_cmdfa,
                             i_up=rep.i_up, i_low=rep.i_low))
    return rows
