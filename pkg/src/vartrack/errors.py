"""Exception types shared across the package."""


class VartrackError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(VartrackError):
    """Invalid pipeline or scene configuration."""


class SequenceIOError(VartrackError):
    """Fatal I/O failure while reading or writing sequence data."""


class SequenceFormatError(VartrackError):
    """Malformed input data (bad image, mixed resolutions, bad ground-truth line)."""


class EmptySequenceError(VartrackError):
    """A sequence directory matched zero frames."""


class NoSignalError(VartrackError):
    """Phase correlation received an all-zero spectrum."""


class InsufficientHistoryError(VartrackError):
    """Background modelling needs at least two history frames."""


class InsufficientFramesError(VartrackError):
    """The sequence is not longer than the history window."""


class EvaluationError(VartrackError):
    """Evaluation was asked to aggregate nothing or to divide by zero time."""
