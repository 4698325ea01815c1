"""Exception hierarchy shared by all qcreg modules.

CLI exit-code mapping: ValidationError/DomainError/ParseError/CapacityError
are usage problems (exit 1); OptimizationError/NumericalError are runtime
numerical failures (exit 2).
"""


class QcregError(Exception):
    """Base class for all qcreg errors."""


class ValidationError(QcregError):
    """Bad argument, shape, index, or inconsistent configuration."""


class DomainError(ValidationError):
    """Input value outside an encoder's mathematical domain."""


class CapacityError(ValidationError):
    """Problem size exceeds a configured qubit or memory budget."""


class ParseError(QcregError):
    """Malformed CSV, config, or model file; message carries the line number."""


class OptimizationError(QcregError):
    """Objective returned a non-finite value during optimization."""

    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta


class NumericalError(QcregError):
    """Numerical failure (rank deficiency, non-finite linear algebra result)."""
