"""Exception hierarchy. The CLI maps each class to an exit status."""


class CongestionError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(CongestionError, ValueError):
    """Input violates a documented precondition (exit status 2)."""


class SizeCapError(PreconditionError):
    """An exhaustive routine was asked to exceed its hard size cap."""


class InfeasibleError(CongestionError):
    """A strategy set or aggregated problem has no feasible point (exit status 3)."""


class InvariantViolation(CongestionError, AssertionError):
    """An internal guarantee failed, e.g. a fractional vertex on a TU system (exit status 4)."""
