"""Exception types shared across the library."""


class WitError(Exception):
    """Base class for library errors."""


class PoleError(WitError):
    """Argument sits on (or within tolerance of) a pole."""


class DomainError(WitError):
    """Argument outside the supported domain."""


class RangeError(WitError):
    """Argument outside the range the chosen algorithm supports."""


class NonConvergence(WitError):
    """Series or quadrature failed to reach tolerance within budget."""


class UnsupportedParameters(WitError):
    """Parameter pattern not covered by any available route."""


class InvalidParams(WitError):
    """Transform parameters violate a validity predicate."""


class HintViolation(WitError):
    """Sampled integrand exceeds its declared decay envelope."""


class AccuracyLoss(WitError):
    """Routes disagree beyond the expected level near a switchover."""
