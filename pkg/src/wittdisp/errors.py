"""Exception types shared across the package."""


class WittDispError(Exception):
    """Base class for all errors raised by this package."""


class NotDivisible(WittDispError):
    pass


class BudgetExceeded(WittDispError):
    """A configured work budget (steps, points, candidates) ran out."""


class ConstantTermNonzero(WittDispError):
    pass


class NotPrime(WittDispError):
    pass


class DomainMismatch(WittDispError):
    pass


class NotFinite(WittDispError):
    """The quotient ring of a presentation is infinite-dimensional."""


class NotUnit(WittDispError):
    pass


class PrecisionTooSmall(WittDispError):
    pass


class InvalidFrameElement(WittDispError):
    pass


class AxiomViolation(WittDispError):
    pass


class BaseMismatch(WittDispError):
    pass


class WeightOutOfRange(WittDispError):
    pass


class EliminationFailed(WittDispError):
    pass


class CacheCorrupt(WittDispError):
    pass
