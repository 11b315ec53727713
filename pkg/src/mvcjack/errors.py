"""Exception hierarchy shared across the package."""


class MvcError(Exception):
    """Base class for all errors raised by this package."""


class EntryOutOfRange(MvcError):
    """A concentration entry lies outside [0, 1] beyond tolerance."""


class RowSumViolation(MvcError):
    """A concentration row does not sum to 1 within tolerance."""

    def __init__(self, row: int, total: float):
        self.row = row
        self.total = total
        super().__init__(f"concentration row {row} sums to {total!r}, expected 1")


class SingularGram(MvcError):
    """Gram matrix of the concentration columns is numerically singular."""


class DimensionMismatch(MvcError):
    """Inputs have incompatible shapes."""


class LeverageAtOne(MvcError):
    """Deleting an observation would make the Gram matrix singular."""

    def __init__(self, index: int, leverage: float):
        self.index = index
        self.leverage = leverage
        super().__init__(f"leverage {leverage!r} at observation {index} is too close to 1")


class StatisticEvaluationError(MvcError):
    """The plug-in statistic failed at a leave-one-out mean."""

    def __init__(self, index, cause: Exception):
        self.index = index
        self.cause = cause
        where = "full-sample mean" if index is None else f"leave-one-out mean {index}"
        super().__init__(f"statistic evaluation failed at {where}: {cause}")


class DegenerateSlope(MvcError):
    """Cross-moment too small; the orthogonal-regression slope is undefined."""


class SingularACM(MvcError):
    """Jackknife covariance estimate is numerically singular."""


class DomainError(MvcError):
    """Argument outside the mathematical domain of a function."""


class NegativeVariance(MvcError):
    """A variance entry is negative."""


class UnsupportedDimension(MvcError):
    """Operation only defined for two-dimensional parameters."""


class ParseError(MvcError):
    """Malformed input data file."""


class ConfigError(MvcError):
    """Malformed or inconsistent experiment configuration."""
