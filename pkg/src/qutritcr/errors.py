"""Exception types shared across the package."""


class QutritCRError(Exception):
    """Base class for all package errors."""


class NotHermitian(QutritCRError):
    pass


class NotUnitary(QutritCRError):
    pass


class NotDensityMatrix(QutritCRError):
    pass


class DimMismatch(QutritCRError):
    pass


class InvalidParams(QutritCRError):
    pass


class OutOfRange(QutritCRError):
    pass


class UnknownGate(QutritCRError):
    pass


class SingularDenominator(QutritCRError):
    pass


class StepFailure(QutritCRError):
    pass


class NormDrift(QutritCRError):
    pass


class NoOscillation(QutritCRError):
    pass


class CalibrationFailed(QutritCRError):
    pass


class BadDistribution(QutritCRError):
    pass
