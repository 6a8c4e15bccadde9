"""Exception types raised across the package."""


class EllSurjError(ValueError):
    """Base class for all domain errors."""


class ZeroDenominator(EllSurjError, ZeroDivisionError):
    pass


class InvalidModulus(EllSurjError):
    pass


class SingularCurve(EllSurjError):
    pass


class PoleAtPoint(EllSurjError):
    pass


class BadReduction(EllSurjError):
    pass


class UnsupportedCharacteristic(EllSurjError):
    pass


class InvalidInput(EllSurjError):
    pass


class InvalidLevel(EllSurjError):
    pass


class PreconditionFailed(EllSurjError):
    pass


class NoWitnessFound(EllSurjError):
    """No (f, chi) relation exists for a proper subgroup; this contradicts the lemma."""


class TooFewFactors(EllSurjError):
    pass


class UnsupportedParameters(EllSurjError):
    pass
