"""
Exception hierarchy for the ABC consistency toolkit.

Library code logs and raises these; only the command line layer turns them
into exit codes.
"""

from typing import Optional


class AbcToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(AbcToolkitError, ValueError):
    """A parameter, length, tolerance or region precondition was violated."""


class IntegrationError(AbcToolkitError, ArithmeticError):
    """The ODE state left the admissible box [0, 1e6]^2."""


class DegenerateDesignError(AbcToolkitError, ArithmeticError):
    """The OLS normal-equations matrix is singular."""


class RefinementError(AbcToolkitError, ArithmeticError):
    """Newton refinement of a preimage candidate did not converge."""

    def __init__(self, message: str, last_point=None, residual: float = float("inf")):
        super().__init__(message)
        self.last_point = last_point
        self.residual = residual


class EmptyPosteriorError(AbcToolkitError):
    """An operation needs accepted draws and the posterior has none (or too few)."""


class ConfigError(AbcToolkitError):
    """
    Configuration could not be parsed or a field is invalid.

    Attributes:
        field: Dotted name of the offending field, if known
        line: 1-based line number in the source file, if known
        column: 1-based column number in the source file, if known
    """

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None
    ):
        self.field = field
        self.line = line
        self.column = column
        location = []
        if line is not None:
            location.append(f"line {line}")
            if column is not None:
                location.append(f"column {column}")
        if field is not None:
            location.append(f"field '{field}'")
        detail = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{detail}")
