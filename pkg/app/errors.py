from typing import Optional


class CanonConvError(Exception):
    """Base class for every error raised by the canonconv package."""


class InputError(CanonConvError, ValueError):
    """A caller broke a precondition: vertex out of range, bad sizes, size limit."""


class Graph6Error(InputError):
    """Malformed graph6 text. `offset` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class PackingError(CanonConvError):
    """Circle packing could not be computed for the given embedding."""

    def __init__(self, message: str, residual: Optional[float] = None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class ConstructionError(CanonConvError):
    """Convex representation could not be built (spec mismatch, delta exhausted)."""


class DefectError(CanonConvError, RuntimeError):
    """A guaranteed outcome failed. Always a bug, never a property of the input."""
