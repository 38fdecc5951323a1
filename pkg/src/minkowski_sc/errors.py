"""Exceptions raised by the minkowski-sc package.

They all derive from ``ValueError`` (bad input) or ``RuntimeError`` (a
computation that could not deliver), so callers can catch them generically.
"""


class NormSpecError(ValueError):
    """Norm spec string cannot be parsed or describes an unsupported norm."""


class DegenerateSegmentError(ValueError):
    """Bisector requested for a segment with a == b."""


class ChordMissesBallError(ValueError):
    """Chord offset lies outside the open strip (-t0, t0)."""


class PreconditionError(ValueError):
    """An operation's documented precondition does not hold."""


class CurveFormatError(ValueError):
    """Malformed curve CSV."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RootFindingError(RuntimeError):
    """A bracketed root finder failed to converge."""


class StrictConvexityError(RuntimeError):
    """Estimated alpha0 or kappa is inconsistent with a strictly convex norm."""


class DivergenceError(RuntimeError):
    """Explicit Euler iterates left the finite range."""


class CertificateError(RuntimeError):
    """A certificate inequality failed on a concrete curve."""


class LemmaViolationError(CertificateError):
    """Both components of the near-orthogonal tail region are occupied."""


class LengthBoundError(CertificateError):
    """Length-to-diameter ratio exceeds the certified constant."""
