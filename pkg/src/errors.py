"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class CutTailError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CutTailError, ValueError):
    """A value violates the invariants of a domain type or operation."""


class MatrixParseError(InvalidInputError):
    """A matrix file could not be parsed."""

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None) -> None:
        location = ""
        if line is not None:
            location = f"line {line}"
            if column is not None:
                location += f", column {column}"
            location += ": "
        super().__init__(f"{location}{message}")
        self.line = line
        self.column = column


class SpectrumParseError(InvalidInputError):
    """A spectrum string does not follow the `a`, `a+bi`, `a:r` grammar."""


class NotHurwitzError(CutTailError):
    """The matrix or spectrum has an eigenvalue with nonnegative real part."""


class NumericalError(CutTailError):
    """A numerical routine failed to produce a trustworthy result."""


class EigenvalueConvergenceError(NumericalError):
    """The shifted QR iteration hit its sweep cap."""


class MatrixExponentialOverflowError(NumericalError):
    """e^{tA} is not representable in double precision."""


class LinearProgramError(NumericalError):
    """A linear program ended in a non-optimal status."""


class DegenerateBasisError(NumericalError):
    """A basis function vanishes at every constraint point."""

    def __init__(self, function: str) -> None:
        super().__init__(f"basis function {function} vanishes at every constraint point")
        self.function = function


class ExchangeNotConvergedError(NumericalError):
    """The exchange loop hit its iteration cap before the bracket closed."""

    def __init__(self, iterations: int, lower: float, upper: float) -> None:
        super().__init__(
            f"exchange did not converge in {iterations} iterations; "
            f"value bracket [{lower:.12g}, {upper:.12g}]"
        )
        self.iterations = iterations
        self.lower = lower
        self.upper = upper


class RootFindingError(NumericalError):
    """A scalar root could not be bracketed or refined."""


class GeometryError(CutTailError):
    """Base class for planar-hull failures."""


class DegenerateHullError(GeometryError):
    """The symmetrized point set is collinear."""


class HorizonTooShortError(GeometryError):
    """The sampled trajectory has not decayed enough at the horizon."""


class PlotRefusedError(CutTailError):
    """A plot was requested that does not exist for this dimension."""
