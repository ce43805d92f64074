"""Exception types raised across the package."""


class EITFWMError(Exception):
    """Base class for all package errors."""


class DomainError(EITFWMError, ValueError):
    """An argument lies outside the domain of a physical formula."""


class ConfigurationError(EITFWMError, ValueError):
    """Invalid solver grid, pulse specification or experiment config."""


class SingularSystemError(EITFWMError, ArithmeticError):
    """The steady-state coherence equations have no unique solution."""


class NumericalBlowupError(EITFWMError, ArithmeticError):
    """A field or coherence became non-finite during integration."""

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index


class TraceFormatError(EITFWMError, ValueError):
    """A trace file could not be parsed or failed validation."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column
