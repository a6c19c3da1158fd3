"""Exception hierarchy shared by all evaluation routines."""


class EllballError(Exception):
    """Base class for errors raised by this package."""


class DomainError(EllballError, ValueError):
    """The input lies outside the domain where the function is defined."""


class BranchCutError(DomainError):
    """The input ball straddles a branch cut, so no single branch can be chosen."""


class PoleError(DomainError):
    """The input ball touches a pole of a meromorphic function."""


class UnsupportedDomainError(DomainError):
    """The algorithm is not known to be valid for this input (never silently wrong)."""


class ConvergenceError(EllballError, ArithmeticError):
    """A series or iteration failed to converge within its budget."""
