"""Shared exception types.

Exit-code mapping used by the CLI: ParameterError -> usage (2),
CapabilityError -> capability/numeric (3).
"""


class FlatpolyError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(FlatpolyError, ValueError):
    """An argument violates a documented precondition (bad length, range,
    exponent constraint, grid resolution, ...)."""


class DegenerateInputError(FlatpolyError, ValueError):
    """Input is structurally valid but degenerate for the requested
    operation (zero polynomial, all-zero magnitudes, all-zero grid)."""


class CapabilityError(FlatpolyError, RuntimeError):
    """The request exceeds a configured desk-scale cap (degree threshold,
    enumeration budget, search length)."""
