"""Exception hierarchy shared by every module of the package."""


class HuboFactorError(Exception):
    """Base class for all package errors."""


class AssignmentTooShort(HuboFactorError, ValueError):
    pass


class InvalidLayout(HuboFactorError, ValueError):
    pass


class NotOddCapable(HuboFactorError, ValueError):
    """A fixed least-significant bit cannot encode a factor of an even number."""


class ZeroCoefficient(HuboFactorError, ValueError):
    pass


class WrongArity(HuboFactorError, ValueError):
    pass


class NonPositiveCoefficient(HuboFactorError, ValueError):
    pass


class NegativeQuarticCoefficient(NonPositiveCoefficient):
    pass


class UnsupportedDegree(HuboFactorError, ValueError):
    pass


class TooManyVariables(HuboFactorError, ValueError):
    pass


class EmptyPolynomial(HuboFactorError, ValueError):
    pass


class NoBlocksInPlan(HuboFactorError, ValueError):
    pass


class StageMinimumAmbiguous(HuboFactorError, RuntimeError):
    """Too many distinct stage minimizers to explore within the branch budget."""


class ModelFileError(HuboFactorError, OSError):
    pass


class IoFailure(ModelFileError):
    pass


class ParseFailure(ModelFileError):
    def __init__(self, msg, line=None, column=None):
        if line is not None:
            msg = f"{msg} (line {line}, column {column})"
        super().__init__(msg)
        self.line = line
        self.column = column


class VersionMismatch(ModelFileError):
    pass
