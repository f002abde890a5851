"""Exception types shared across the package."""


class CommonInfoError(ValueError):
    """Base class for all input and solver errors raised by commoninfo."""


class NegativeEntry(CommonInfoError):
    pass


class AllZero(CommonInfoError):
    pass


class UnknownAxis(CommonInfoError, KeyError):
    pass


class OverlappingGroups(CommonInfoError):
    pass


class ShapeMismatch(CommonInfoError):
    pass


class MarginalMismatch(CommonInfoError):
    pass


class ParseError(CommonInfoError):
    pass


class TooLarge(CommonInfoError):
    pass


class EmptyCurve(CommonInfoError):
    pass


class InsufficientPoints(CommonInfoError):
    pass


class Infeasible(CommonInfoError):
    pass


class UnsupportedDistortion(CommonInfoError):
    pass


class NonPositiveDistortion(CommonInfoError):
    pass


class BadParameter(CommonInfoError):
    pass


class RegimeMismatch(CommonInfoError):
    pass


class NotConverged(CommonInfoError):
    """Raised only by callers that demand convergence; solvers flag instead."""
