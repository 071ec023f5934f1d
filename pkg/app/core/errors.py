"""Exception hierarchy shared by the core modules, the CLI and the HTTP service."""


class EmaError(ValueError):
    """Base class for every error raised by the toolchain."""


class DomainError(EmaError):
    """Argument outside the domain of a special function or transfer function."""


class IndexRangeError(EmaError):
    """Harmonic index out of range (|m| > n, negative order, order cap)."""


class ConfigurationError(EmaError):
    """Invalid configuration (radial config, geometry file, settings)."""


class GeometryError(EmaError):
    """Microphone ring cannot support the requested mode or order."""


class ShapeError(EmaError):
    """Ragged or wrongly shaped signal arrays."""


class MismatchError(EmaError):
    """Sample rates or orders of two inputs do not agree."""


class NumericalError(EmaError):
    """A computed quantity collapsed to a value the pipeline cannot invert."""

    def __init__(self, message: str, mode: int | None = None, bin_index: int | None = None):
        super().__init__(message)
        self.mode = mode
        self.bin_index = bin_index


class ConditioningError(EmaError):
    """Direction grid too degenerate for the requested SH order."""

    def __init__(self, message: str, condition_number: float = float("inf")):
        super().__init__(message)
        self.condition_number = condition_number


class AudioFormatError(EmaError):
    """Audio file could not be interpreted."""


class UnsupportedCodecError(AudioFormatError):
    """Audio encoding other than 16/24-bit PCM or 32-bit float."""


class CorruptFileError(AudioFormatError):
    """Header or payload is truncated or malformed."""


class EmptyFileError(AudioFormatError):
    """File holds no audio frames."""


class ContainerFormatError(EmaError):
    """Filter-bank or HRTF-grid container is malformed."""
