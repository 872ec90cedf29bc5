"""Exception hierarchy shared across the package."""


class HetbiasError(Exception):
    """Base class for all package errors."""


class DataError(HetbiasError, ValueError):
    """Input data cannot be used as given."""


class ConstantRegressor(DataError):
    pass


class TooShort(DataError):
    pass


class IncompatibleShape(DataError):
    pass


class LengthMismatch(DataError):
    pass


class IndexOutOfRange(HetbiasError, IndexError):
    pass


class RankDeficient(DataError):
    pass


class InfeasibleMoments(HetbiasError, ValueError):
    """Requested skewness/kurtosis pair violates K >= 1 + S**2."""


class NumericalFailure(HetbiasError, ArithmeticError):
    """An iterative numerical procedure did not produce an answer."""


class MomentMatchFailed(NumericalFailure):
    pass


class NoBracket(NumericalFailure):
    pass


class DegenerateSampleSize(NumericalFailure):
    pass
