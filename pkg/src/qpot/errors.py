"""Exceptions shared across the package.

The CLI maps these onto its exit codes, so they are collected in one
place rather than defined next to each raise site.
"""

from __future__ import annotations


class QpotError(Exception):
    """Base class for package errors."""


class ParseError(QpotError):
    """Command input (selector, grid, units) could not be parsed."""


class OperatorParseError(ParseError):
    """The operator mini-language could not be parsed; names the offending token."""


class IncompatibleError(QpotError):
    """State, operator, and representation do not fit together."""


class NodePointError(QpotError):
    """An R-ratio was requested where the amplitude R vanishes (a node)."""

    def __init__(self, message: str, point: float | None = None):
        super().__init__(message)
        self.point = point


class NonUniformGridError(QpotError):
    """Sampled-state grid spacing is not uniform to the required tolerance."""


class PhaseUnwrapFailure(QpotError):
    """Adjacent phase samples jump by more than pi/2 away from any node."""


class QuadratureNotConvergedError(QpotError):
    """Doubling the quadrature resolution moved the result by more than 10%."""


class StepTooLargeError(QpotError):
    """A single integrator step drifted the conserved energy beyond tolerance."""


class CausalityError(IncompatibleError):
    """Trajectory initial conditions violate the causal constraint of the representation."""
