"""Exception hierarchy.

Every validation failure derives from :class:`SirThresholdError`, which is a
``ValueError`` so callers that only care about "bad input" can catch that.
"""


class SirThresholdError(ValueError):
    """Base class for all validation errors raised by the package."""


class DomainError(SirThresholdError):
    """Argument lies outside the domain of a function."""


class InvalidArgument(SirThresholdError):
    pass


class InvalidInitialCondition(SirThresholdError):
    pass


class InvalidThreshold(SirThresholdError):
    """Threshold ``M`` outside ``I(0) < M < S(0) + I(0)``."""


class RegimeError(SirThresholdError):
    """Closed-form peak is only an upper bound (``R0 < N/S(0)``)."""


class InvalidRange(SirThresholdError):
    pass
