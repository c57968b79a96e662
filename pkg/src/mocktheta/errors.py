r"""
Exception hierarchy.

Every failure raised on purpose by the library derives from
:class:`MockThetaError`.  The command line maps :class:`UsageError` and
:class:`DomainError` (and their subclasses) to exit status 2.
"""


class MockThetaError(Exception):
    """Base class of all library errors."""


class UsageError(MockThetaError, ValueError):
    """Malformed or inconsistent arguments (mismatched orders, boxes, ...)."""


class ScopeError(UsageError):
    """Parameters outside the range where a formula is asserted."""


class DomainError(MockThetaError, ValueError):
    r"""Point outside the domain, e.g. `\Im\tau \le 0`."""


class PoleError(DomainError):
    """Evaluation point too close to a pole of a denominator."""


class PrefactorZeroError(DomainError):
    """A theta prefactor that a closed form divides by (nearly) vanishes."""


class UnsupportedSubstitution(UsageError):
    """Argument substitution that leaves rational exponent arithmetic."""
