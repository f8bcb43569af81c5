"""Exception hierarchy for mlstream.

Everything raised on purpose by this package derives from :class:`MlsError`,
so callers can catch one base class at pipeline boundaries.
"""


class MlsError(Exception):
    """Base class for all mlstream errors."""


# --- time sets ---------------------------------------------------------------

class ResolutionMismatch(MlsError):
    """Two time sets (or graphs) with different tick resolutions were combined."""


# --- graph construction ------------------------------------------------------

class ClosureViolation(MlsError):
    """A link or presence entry is not covered by the required presence set."""


class OutOfStudyInterval(MlsError):
    """A time instant or interval lies outside the study interval."""


class UnknownAspectCoordinate(MlsError):
    """A layer coordinate does not belong to its aspect."""


class UnknownNode(MlsError):
    pass


class UnknownNodeLayer(MlsError):
    pass


class UnknownLayer(MlsError):
    pass


class IntralayerOnlyViolation(MlsError):
    """An interlayer link was added to a graph built with ``intralayer_only``."""


# --- measures ----------------------------------------------------------------

class ZeroStudyInterval(MlsError):
    """The study interval has zero duration where a positive one is required."""


class MissingAspect(MlsError):
    """An analysis requires an aspect the graph does not carry."""


# --- centrality --------------------------------------------------------------

class InsufficientRows(MlsError):
    """Covariance needs at least two exposure rows."""


class NonSymmetric(MlsError):
    pass


class NegativeEntry(MlsError):
    pass


class ZeroMatrix(MlsError):
    pass


class FewerThanTwoLayers(MlsError):
    pass


class NotConverged(MlsError):
    """Power iteration hit its iteration cap.

    Carries the last iterate so callers can inspect how far it got.
    """

    def __init__(self, message, eigenvalue=None, eigenvector=None, iterations=0):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.eigenvector = eigenvector
        self.iterations = iterations


# --- ingestion ---------------------------------------------------------------

class MalformedLine(MlsError):
    """A dataset line could not be parsed; carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        super().__init__(message)
        self.line_no = line_no


class UnknownStudentId(MlsError):
    pass


class MissingColumn(MlsError):
    pass


class MalformedTime(MlsError):
    pass


# --- interchange -------------------------------------------------------------

class FormatVersionMismatch(MlsError):
    pass


class ChecksumMismatch(MlsError):
    pass


class SchemaError(MlsError):
    """An interchange document violates the schema; carries a path into it."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
