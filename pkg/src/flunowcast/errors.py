"""Exception types shared across the package.

Every raised condition has a dedicated class so callers can discriminate
failure modes without string matching.
"""


class FluNowcastError(Exception):
    """Base class for all package errors."""


class EmptyIntersection(FluNowcastError):
    """Series share no common week range."""


class DegenerateInput(FluNowcastError):
    """An input has zero variance where variation is required."""


class ShapeMismatch(FluNowcastError):
    """Array dimensions disagree with the fitted parameters."""


class EmptyCorpus(FluNowcastError):
    """A term-ranking corpus contains no documents."""


class AlignmentError(FluNowcastError):
    """Series cover different week ranges where identical ranges are required."""


class InsufficientHistory(FluNowcastError):
    """A feature or forecast needs weeks that precede the available data."""


class EmptyTrain(FluNowcastError):
    """An evaluation split has no training rows."""


class NoData(FluNowcastError):
    """A model fit was requested on an empty dataset."""


class NonConvergence(FluNowcastError):
    """An iterative fit exhausted its iteration budget."""


class SeriesTooShort(FluNowcastError):
    """A time series is too short for the requested model order."""


class DegenerateActuals(FluNowcastError):
    """R^2 is undefined because the actual values are constant."""


class AllActualsZero(FluNowcastError):
    """MAPE is undefined because every actual value is zero."""
