from __future__ import annotations

from typing import Any


class HydroLimitError(Exception):
    """Base class for all errors raised by hydrolimit."""

    pass


class DomainError(HydroLimitError, ValueError):
    """Raised when an argument lies outside the domain of an operation."""

    pass


class ConfigError(HydroLimitError, ValueError):
    """Raised when a run configuration is invalid."""

    pass


class FormatError(HydroLimitError, ValueError):
    """Raised when an artifact file cannot be parsed."""

    pass


class NumericalError(HydroLimitError, ArithmeticError):
    """Raised when a numerical procedure fails; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics: dict[str, Any] = dict(diagnostics or {})

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{k}={v!r}" for k, v in sorted(self.diagnostics.items()))
        return f"{base} ({details})"


class SingularityError(NumericalError):
    """Raised when two particles coincide inside the interaction range."""

    pass


class RunawayError(NumericalError):
    """Raised when an event loop exceeds its event budget."""

    pass


class ConstructionError(HydroLimitError):
    """Raised when the cascade cannot be placed as planned."""

    pass


class UnsupportedCollisionError(HydroLimitError):
    """Raised for 1D meeting patterns other than binary and triple collisions."""

    pass
