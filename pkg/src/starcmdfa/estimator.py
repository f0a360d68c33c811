"""Scikit-learn compatible wrapper around the exact star decomposition."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .data import correlation_from_samples, estimate_alpha
from .exceptions import DomainError
from .model import build_covariance, canonicalize, solve
from .verify import check_certificate


class StarCMDFA(TransformerMixin, BaseEstimator):
    """Single-factor analysis with an exact minimum-determinant noise fit.

    ``fit`` estimates the star loadings from the empirical correlation
    matrix of ``X`` and computes the exact decomposition
    ``corr(X) = sigma_t_ + diag(noise_variance_)`` minimizing
    ``-sum(log(noise_variance_))``.  Use :meth:`fit_from_loadings` or
    :meth:`fit_from_covariance` to skip the estimation step.

    Parameters
    ----------
    tol_root : float
        Relative tolerance of the scalar root finder used in the dominant
        regime.
    eps_class : float or None
        Width of the boundary classification band; None uses the default
        1e-12 * max(1, theta_1).
    """

    def __init__(self, tol_root: float = 1e-12, eps_class: float | None = None):
        self.tol_root = tol_root
        self.eps_class = eps_class

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=2, ensure_min_features=3)
        C = correlation_from_samples(X)
        model, residual = estimate_alpha(C)
        return self._finalize(model, residual)

    def fit_from_covariance(self, C):
        """Fit from a unit-diagonal covariance/correlation matrix."""
        model, residual = estimate_alpha(np.asarray(C, dtype=float))
        return self._finalize(model, residual)

    def fit_from_loadings(self, alpha):
        """Fit directly from a known loading vector."""
        return self._finalize(canonicalize(alpha), 0.0)

    def _finalize(self, model, residual):
        sol = solve(model, tol=self.tol_root, eps_class=self.eps_class)
        cov = build_covariance(model.user_alpha)
        self.alpha_ = model.user_alpha
        self.noise_variance_ = sol.d
        self.sigma_t_ = sol.sigma_t
        self.rank_ = sol.rank
        self.regime_ = sol.regime.value
        self.margin_ = sol.margin
        self.certificate_ = check_certificate(cov, sol.d, sol.t)
        self.fit_residual_ = residual
        self.n_features_in_ = model.n
        return self

    def get_covariance(self):
        """Model covariance sigma_t_ + diag(noise_variance_)."""
        check_is_fitted(self, "noise_variance_")
        return self.sigma_t_ + np.diag(self.noise_variance_)

    def transform(self, X):
        """Posterior mean of the latent factors given each observation."""
        check_is_fitted(self, "noise_variance_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise DomainError("feature count does not match the fitted model")
        w, V = np.linalg.eigh(self.sigma_t_)
        keep = w > 1e-10
        W = V[:, keep] * np.sqrt(w[keep])  # sigma_t_ = W W^T
        return X @ np.linalg.solve(self.get_covariance(), W)

    def score(self, X, y=None):
        """Mean Gaussian log-likelihood of X under the fitted covariance."""
        check_is_fitted(self, "noise_variance_")
        X = check_array(X)
        S = self.get_covariance()
        n = S.shape[0]
        sign, logdet = np.linalg.slogdet(S)
        if sign <= 0:
            raise DomainError("fitted covariance is not positive definite")
        quad = np.mean(np.sum(X * np.linalg.solve(S, X.T).T, axis=1))
        return -0.5 * (n * np.log(2.0 * np.pi) + logdet + quad)
