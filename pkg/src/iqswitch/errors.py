"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Bad run configuration (shapes, ranges, missing fields)."""


class RowColSumViolation(ValueError):
    """Rate matrix row or column sums deviate from 1 beyond tolerance."""


class NegativeRate(ValueError):
    """Rate matrix or pmf has a negative entry."""


class SizeLimitExceeded(ValueError):
    """Problem size above what an exhaustive method will accept."""


class ConvergenceFailure(RuntimeError):
    """Iterative solver exhausted its budget before reaching tolerance."""


class InapplicableRegime(ValueError):
    """Parameters fall outside the regime a formula was derived for."""


class DominanceViolation(RuntimeError):
    """Coupled single-server workload exceeded the switch row/column sum."""
