"""Exceptions raised by imfid. The CLI maps them to exit codes."""


class ImfidError(Exception):
    """Base class for all imfid errors."""


class InputShapeError(ImfidError, ValueError):
    """Data or parameter has the wrong length/shape for the model."""


class DegenerateOrbitError(ImfidError, ValueError):
    """Orbit label too small for the position on the orbit to be defined."""


class EmptyHypothesisError(ImfidError, ValueError):
    """Hypothesis is explicitly empty."""


class UnsupportedShapeError(ImfidError, ValueError):
    """Contour shape not supported by an operation (e.g. multimodal)."""


class PreconditionError(ImfidError, ValueError):
    """Operation called outside its documented preconditions."""


class BudgetExceededError(ImfidError, RuntimeError):
    """Requested Monte Carlo work exceeds the configured compute budget."""


class DataFileError(ImfidError, OSError):
    """Data file missing, unreadable or malformed."""
