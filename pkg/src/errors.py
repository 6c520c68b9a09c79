"""
Error hierarchy
Every failure the toolkit reports maps to one class here. The CLI turns
``exit_code`` into the process exit status:

    0 - success
    1 - usage / configuration error
    2 - data error (bad input files, degenerate signals, incompatible models)
    3 - internal invariant violation
"""

from typing import Optional


class OverhearError(Exception):
    """Base class for all toolkit errors."""
    exit_code = 2


# ============================================================================
# CONFIGURATION (exit 1)
# ============================================================================

class ConfigError(OverhearError):
    """Invalid parameter, filter band, study name or config file."""
    exit_code = 1


# ============================================================================
# DATA (exit 2)
# ============================================================================

class DataError(OverhearError):
    """Input data violates a domain invariant."""
    exit_code = 2


class ChannelCountError(DataError):
    """Audio file is not 2-channel."""


class ParseError(DataError):
    """Malformed CSV / JSON / dictionary content."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlignmentError(DataError):
    """Audio and accelerometer durations disagree by more than 50 ms."""


class EmptyInputError(DataError):
    pass


class RangeError(DataError):
    """Time or index outside the session."""


class DegenerateSignalError(DataError):
    """Signal with zero energy where a correlation is required."""


class InsufficientFramesError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class DegenerateLabelsError(DataError):
    """Training labels contain too few classes."""


class StratificationError(DataError):
    """A cross-validation fold would miss a class."""


class CompatError(DataError):
    """Model bundle cannot be read or has an unsupported version."""


class IoError(DataError):
    """Missing or unreadable file."""


# ============================================================================
# INTERNAL INVARIANTS (exit 3)
# ============================================================================

class StateError(OverhearError):
    """Operation called on an object that is not ready (untrained model, unset median)."""
    exit_code = 3


class ShapeError(OverhearError):
    """Array lengths or shapes do not line up."""
    exit_code = 3
