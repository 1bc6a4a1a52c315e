"""Exception types. Every error carries a short machine-readable ``code``."""


class GravLGError(Exception):
    code = "Error"
    exit_status = 1

    def __init__(self, message=""):
        super().__init__(message or self.code)


class ValidationError(GravLGError, ValueError):
    code = "ValidationError"


class NumericalError(GravLGError, ArithmeticError):
    code = "NumericalError"
    exit_status = 2


class NonUnitAxis(ValidationError):
    code = "NonUnitAxis"


class NegativeCoupling(ValidationError):
    code = "NegativeCoupling"


class EquatorialAxisRequired(ValidationError):
    code = "EquatorialAxisRequired"


class NonEquatorialAxis(EquatorialAxisRequired):
    code = "NonEquatorialAxis"


class UnsupportedInit(ValidationError):
    code = "UnsupportedInit"


class UnsupportedRegime(ValidationError):
    code = "UnsupportedRegime"


class TimeOrder(ValidationError):
    code = "TimeOrder"


class MissingDensity(ValidationError):
    code = "MissingDensity"


class InvalidSetup(ValidationError):
    code = "InvalidSetup"


class DimensionTooSmall(ValidationError):
    code = "DimensionTooSmall"


class DimensionMismatch(ValidationError):
    code = "DimensionMismatch"


class NotALocalMin(ValidationError):
    code = "NotALocalMin"


class EngineUnavailable(ValidationError):
    code = "EngineUnavailable"


class ParseError(ValidationError):
    code = "ParseError"


class SchemaError(ValidationError):
    code = "SchemaError"

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class TruncationInsufficient(NumericalError):
    code = "TruncationInsufficient"


class EigenFailure(NumericalError):
    code = "EigenFailure"


class StepTooLarge(NumericalError):
    code = "StepTooLarge"


class IoError(GravLGError, OSError):
    code = "IoError"


class SmallCouplingWarning(UserWarning):
    """Small-coupling approximation used outside the regime it is meant for."""
