"""Exception types shared across the package."""

from __future__ import annotations


class RotascopeError(Exception):
    """Base class for all library errors."""


class DomainError(RotascopeError):
    """Input does not describe an orientation preserving circle diffeomorphism."""


class NonConvergence(RotascopeError):
    """An iterative solver exhausted its budget without meeting tolerance."""


class CapExceeded(RotascopeError):
    """Requested iterate count exceeds the configured cap."""


class QCapExceeded(RotascopeError):
    """Farey bracket refinement hit the denominator cap before reaching tolerance.

    The enclosure reached so far is still valid and is carried on the
    `estimate` attribute.
    """

    def __init__(self, message: str, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class RangeError(RotascopeError):
    """Target value lies outside the reachable rotation range."""


class Unresolvable(RotascopeError):
    """The solver cannot separate the target from the enclosure at the cap.

    Carries the final bracket on the `bracket` attribute when available.
    """

    def __init__(self, message: str, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class DegenerateInput(RotascopeError):
    """Input sits too close to a low resolution rational for the requested depth."""


class CombinatoricsViolation(RotascopeError):
    """A return-time interval family failed a disjointness or containment check."""

    def __init__(self, message: str, margins=None):
        super().__init__(message)
        self.margins = margins


class PreconditionFailed(RotascopeError):
    """A documented precondition of the operation does not hold."""


class OrderMismatch(RotascopeError):
    """Orbit order disagrees with the rigid rotation order at the working depth."""


class BoundViolation(RotascopeError):
    """A computed quantity violated an inequality it is supposed to satisfy."""
