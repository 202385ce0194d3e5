"""Exception types shared across the library."""


class BranchCutError(ValueError):
    """Principal-branch power requested at a point on the closed negative real axis."""


class DomainError(ValueError):
    """Argument lies outside the open cone (or another required domain)."""


class BudgetExceededError(RuntimeError):
    """Quadrature failed to reach the requested tolerance within the node budget."""


class DivergentIntegralError(ArithmeticError):
    """Integral classified as divergent by the truncation ladder."""


class NonPositiveValueError(ValueError):
    """Log-log exponent fit received a non-positive family value."""


class CalibrationError(RuntimeError):
    """Kernel-constant calibration residual exceeded tolerance at full effort."""


class UnboundedNormError(ArithmeticError):
    """Supremum search detected unbounded growth along the scale ladder."""


class IllConditionedError(RuntimeError):
    """Atomic-coefficient fit residual exceeded tolerance."""


class ConfigError(ValueError):
    """Suite configuration is malformed (unknown key, bad type, missing field)."""


class HypothesisFailedError(AssertionError):
    """Representation-identity residual exceeded tolerance in the decomposition check."""
