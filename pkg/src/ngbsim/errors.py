"""Exception hierarchy shared by every module of the package."""


class NgbsError(Exception):
    """Base class for numerical and domain failures."""


class NonUnitaryError(NgbsError, ValueError):
    pass


class SingularSigmaQError(NgbsError, ValueError):
    pass


class DimensionTooLargeError(NgbsError, ValueError):
    pass


class FactorMismatchError(NgbsError, ValueError):
    pass


class InvalidPError(NgbsError, ValueError):
    pass


class EmptyInstanceError(NgbsError, ValueError):
    pass


class NegativeProbabilityError(NgbsError, ArithmeticError):
    pass


class ComplexResidualError(NgbsError, ArithmeticError):
    pass


class DegenerateTargetError(NgbsError, ValueError):
    pass


class CutoffTooSmallError(NgbsError, ValueError):
    pass


class HeraldImpossibleError(NgbsError, ArithmeticError):
    pass


class WiringConflictError(NgbsError, ValueError):
    pass


class ConfigError(Exception):
    """Raised for malformed experiment configuration documents."""
