"""Semantic exception hierarchy shared by all modules."""


class MiwError(Exception):
    """Base class for all library errors."""


class NonConvergence(MiwError):
    """Adaptive quadrature exhausted its subdivision budget."""


class NoBracket(MiwError):
    """Root finder was given an interval without a sign change."""


class OutOfRange(MiwError):
    """Monotone inversion target lies outside the supplied bracket."""


class UnsupportedOrder(MiwError):
    """Hermite order outside the supported range (k > 30 or k < 0)."""


class KernelSingularity(MiwError):
    """Closed-form kernel evaluated at a zero of the baseline."""


class InvalidStart(MiwError):
    """Shooting iteration started from a nonpositive first point."""


class ParityUnsupported(MiwError):
    """Requested world count has the wrong parity for the family."""


class BracketFailure(MiwError):
    """No sign change found for the shooting parameter after expansion."""


class ResidualFailure(MiwError):
    """Mirrored configuration violates the recursion beyond tolerance."""


class NotDecreasing(MiwError):
    """Configuration points are not strictly decreasing."""


class BaselineZero(MiwError):
    """Baseline vanishes at a point where a positive value is required."""


class AsymmetricInput(MiwError):
    """Atoms fail the x_n = -x_{N+1-n} symmetry requirement."""


class MismatchedBreakpoints(MiwError):
    """Empirical atoms and density breakpoints do not coincide."""


class AtomAtZero(MiwError):
    """An atom sits at zero, so reciprocal moments are undefined."""
