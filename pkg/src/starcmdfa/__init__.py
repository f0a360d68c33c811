"""Exact minimum-determinant factor analysis of star-structured
Gaussian covariance matrices."""

__version__ = "0.1.0"

from .data import SampleBatch, correlation_from_samples, estimate_alpha, sample
from .dominant import Bounds, DominantAux
from .estimator import StarCMDFA
from .exceptions import (CmdfaError, ConstructionError, ConvergenceError,
                         DomainError, InfeasibleError, NumericalError,
                         RegimeError)
from .info import MiReport, SweepRow, mi_report, mutual_info, sweep_theta1
from .model import (CmdfaSolution, DominanceClass, Regime, StarCovariance,
                    StarModel, build_covariance, canonicalize, classify,
                    loadings_from_snr, snr_from_loadings, solve)
from .verify import Certificate, brute_force_oracle, check_certificate, sym_eigen

__all__ = [
    "Bounds", "Certificate", "CmdfaError", "CmdfaSolution",
    "ConstructionError", "ConvergenceError", "DominanceClass", "DominantAux",
    "DomainError", "InfeasibleError", "MiReport", "NumericalError",
    "Regime", "RegimeError", "SampleBatch", "StarCMDFA", "StarCovariance",
    "StarModel", "SweepRow", "brute_force_oracle", "build_covariance",
    "canonicalize", "check_certificate", "classify",
    "correlation_from_samples", "estimate_alpha", "loadings_from_snr",
    "mi_report", "mutual_info", "sample", "snr_from_loadings", "solve",
    "sweep_theta1", "sym_eigen",
]
