"""Exception hierarchy.

``ConfigError`` maps to CLI exit code 1, everything else raised by the
library maps to exit code 2.
"""


class TwinbeamError(Exception):
    """Base class for all package errors."""


class ConfigError(TwinbeamError):
    """Invalid configuration, experiment spec, or command-line arguments."""


class FrameFormatError(TwinbeamError):
    """Malformed frame file; message carries the file path and offset/line."""


class AnalysisError(TwinbeamError):
    """A pipeline step could not produce a meaningful result."""


class BeamNotFoundError(AnalysisError):
    """No beam-like intensity maximum in the searched region."""


class RegistrationError(AnalysisError):
    """Correlation surface flat; no unique registration shift."""


class StatisticsError(TwinbeamError):
    """An estimator's preconditions are violated (counts, denominators)."""
