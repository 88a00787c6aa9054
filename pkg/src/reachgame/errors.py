"""Exception hierarchy shared across the package."""


class ReachGameError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ReachGameError):
    """Inputs are structurally inconsistent (dimension mismatch, bad parameter)."""


class ValidationError(ReachGameError):
    """A config file or game description failed validation."""


class SizeGuardError(ReachGameError):
    """An exact/brute-force routine was asked to exceed its hard size bound."""


class DegenerateScenarioError(ReachGameError):
    """A metric is undefined for this scenario (e.g. zero reach denominator)."""


class NonConvergenceError(ReachGameError):
    """Raised only by callers that treat a non-converged solve as fatal."""
