"""Exception types raised across the package.

Each error carries a short machine-readable ``code`` used by the CLI when it
reports a failure on a single line.
"""


class SpectraError(Exception):
    code = "error"


class InvalidParameterError(SpectraError, ValueError):
    code = "invalid-parameter"


class UnsupportedMatchingError(SpectraError):
    """No junction conditions are known for the requested ordering."""

    code = "unsupported-matching"


class UnsupportedAnalyticError(SpectraError):
    code = "unsupported-analytic"


class SingularInterfaceError(SpectraError, ZeroDivisionError):
    code = "singular-interface"


class NoBoundStateError(SpectraError):
    code = "no-bound-state"


class ConditionViolationError(SpectraError):
    """A validity inequality of a closed-form spectrum or well fails.

    ``condition`` names the inequality that was violated.
    """

    code = "condition-violation"

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


class NonIsotonicError(ConditionViolationError):
    code = "non-isotonic"


class SpecialFunctionDomainError(SpectraError, ValueError):
    code = "domain-error"


class ConvergenceError(SpectraError, ArithmeticError):
    code = "non-convergence"

    def __init__(self, message: str, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NumericalInconsistencyError(SpectraError, ArithmeticError):
    code = "numerical-inconsistency"


class ConfigError(SpectraError):
    code = "config-error"
