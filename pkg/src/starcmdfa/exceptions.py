"""Exception hierarchy for the star CMDFA solver."""


class CmdfaError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CmdfaError):
    """Input outside the valid domain (loadings, dimensions, matrices)."""


class RegimeError(CmdfaError):
    """Operation called on a model in the wrong dominance regime."""


class ConvergenceError(CmdfaError):
    """Iterative procedure failed to converge or to bracket its root."""


class ConstructionError(CmdfaError):
    """Certificate construction failed its own validation."""


class NumericalError(CmdfaError):
    """A computed quantity violated a hard numerical validity check."""


class InfeasibleError(CmdfaError):
    """Search found no feasible point (should not occur for valid inputs)."""
