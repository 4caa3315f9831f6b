"""Exception hierarchy shared by all logbench modules."""


class LogbenchError(Exception):
    """Base class for every error raised by this package."""


# -- dataset loading -------------------------------------------------------

class DatasetError(LogbenchError):
    pass


class MissingColumn(DatasetError):
    """A required header column is absent from the input file."""


class EmptyDataset(DatasetError):
    """The input file has a header but no data rows."""


class MalformedRow(DatasetError):
    """A data row cannot be parsed; carries the 1-based file row number."""

    def __init__(self, row_number: int, reason: str):
        self.row_number = row_number
        super().__init__(f"row {row_number}: {reason}")


# -- prompt construction ---------------------------------------------------

class PromptError(LogbenchError):
    pass


class ArityMismatch(PromptError):
    """Demonstration count does not match the prompt variant."""


class EmptyLog(PromptError):
    """The target log message is empty or whitespace."""


class InsufficientTemplates(PromptError):
    """More demonstrations requested than distinct templates available."""


# -- template canonicalization ---------------------------------------------

class EmptyTemplate(LogbenchError):
    """Canonicalization produced an empty template."""


# -- backend / cache --------------------------------------------------------

class BackendError(LogbenchError):
    pass


class AuthError(BackendError):
    """API credentials are missing or were rejected."""


class RateLimitExhausted(BackendError):
    """All retry attempts were spent on throttled or failed requests."""


class TransportError(BackendError):
    """A non-retryable network or protocol failure."""


class FixtureMiss(BackendError):
    """The fixture backend has no canned response for this prompt."""


class CacheIoError(LogbenchError):
    """The response cache file is unreadable or corrupt."""


# -- metrics / reporting ----------------------------------------------------

class CoverageMismatch(LogbenchError):
    """Predictions do not cover the evaluated dataset exactly once each."""


class EmptyInput(LogbenchError):
    """An operation that needs at least one item received none."""
