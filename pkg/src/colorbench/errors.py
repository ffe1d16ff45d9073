"""Exception types shared across the toolkit."""


class ColorbenchError(Exception):
    """Base class for all toolkit errors."""


class UnknownSpaceError(ColorbenchError):
    """Color space identifier is not in the catalog."""


class SpaceMismatchError(ColorbenchError):
    """Operands were produced in different color spaces."""


class EmptyTemplateError(ColorbenchError):
    """Template contains no pixels."""


class InvalidBinsError(ColorbenchError):
    """Histogram bin count outside the supported set."""


class DimensionMismatchError(ColorbenchError):
    """Image-shaped operands disagree on width or height."""


class TooFewPixelsError(ColorbenchError):
    """Fewer sampled pixels than requested clusters."""


class InvalidSweepError(ColorbenchError):
    """Light sweep step does not divide its interval."""


class NoCandidatesError(ColorbenchError):
    """Search planner found no reachable candidate pose."""


class ConfigError(ColorbenchError):
    """Bad experiment configuration (CLI exit code 2)."""


class CorpusError(ColorbenchError):
    """Corpus missing or image/label pairing broken (CLI exit code 3)."""


class MissingInputError(ColorbenchError):
    """Report merge invoked with no prior command outputs."""
