"""Exception hierarchy shared by all phasefast modules."""


class PhasefastError(Exception):
    """Base class for every error raised by phasefast."""


class ConfigError(PhasefastError, ValueError):
    """An STFT configuration is malformed or does not match its input."""


class NonInvertibleConfigError(ConfigError):
    """The squared-window envelope vanishes somewhere, so synthesis cannot invert analysis."""


class InvalidParamError(PhasefastError, ValueError):
    """A reconstruction parameter is out of range."""


class DomainError(PhasefastError, ValueError):
    """An operand has the wrong shape, length or contents."""


class UndefinedMetricError(PhasefastError, ValueError):
    """A metric was requested on inputs for which it is undefined."""


class ObserverError(PhasefastError):
    """A per-iteration observer callback raised; the run was aborted."""


class WavParseError(PhasefastError):
    """A WAV byte stream is malformed.

    ``offset`` is the byte position at which parsing failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class UnsupportedFormatError(PhasefastError):
    """A well-formed WAV file uses a format outside PCM16 mono."""

    def __init__(self, field: str, value):
        super().__init__(f"unsupported {field}: {value!r}")
        self.field = field
        self.value = value
