"""qcreg: quantum-circuit-learning regression on a classical statevector backend."""

from .errors import (
    CapacityError,
    DomainError,
    NumericalError,
    OptimizationError,
    ParseError,
    QcregError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DomainError",
    "NumericalError",
    "OptimizationError",
    "ParseError",
    "QcregError",
    "ValidationError",
    "__version__",
]
