"""Exception hierarchy shared by every module of the package."""


class FuchsianError(Exception):
    """Base class for all package errors."""


class NotAUnitMultiple(FuchsianError):
    pass


class PellBoundExceeded(FuchsianError):
    pass


class UnsupportedField(FuchsianError):
    pass


class NormMismatch(FuchsianError):
    pass


class DegeneratePoint(FuchsianError):
    pass


class IdentityMatrix(FuchsianError):
    pass


class EmptyDomain(FuchsianError):
    pass


class MaxStepsExceeded(FuchsianError):
    pass


class SignUndecidable(FuchsianError):
    pass


class UnknownGenerator(FuchsianError):
    pass


class PresetError(FuchsianError):
    """Malformed or inconsistent preset definition."""


class NotInImage(FuchsianError):
    pass


class NotInOrderPattern(FuchsianError):
    pass


class NotInGroup(FuchsianError):
    """A codebook matrix is not an element of the preset's group."""


class TauNotInterior(FuchsianError):
    pass


class CollidingPoints(FuchsianError):
    pass


class UnknownLabel(FuchsianError):
    pass


class RealAxisSignal(FuchsianError):
    pass


class ReductionFailed(FuchsianError):
    pass


class EmptyConstellation(FuchsianError):
    pass


class UnsupportedSize(FuchsianError):
    pass
