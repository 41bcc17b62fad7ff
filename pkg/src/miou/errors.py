"""Exception hierarchy shared by all modules.

Two branches matter to the CLI: ``InputError`` maps to exit code 2
(unreadable/malformed inputs) and ``MetricUndefinedError`` maps to exit
code 3 (the requested quantity has no defined value for these inputs).
"""


class MiouError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MiouError):
    """A file, format, or parameter problem; the computation never started."""


class UnreadableFile(InputError):
    pass


class MalformedFormat(InputError):
    pass


class UnsupportedEncoding(InputError):
    """Recognized but unsupported encoding, e.g. compressed RLE strings."""


class UnwritableDestination(InputError):
    pass


class DimensionMismatch(InputError):
    """Pairwise operation on masks with different frames."""


class InvalidCellSize(InputError):
    pass


class ScaleSetTooSmall(InputError):
    """Fewer than two cell sizes; the curve integral is undefined."""


class ShapeExceedsFrame(InputError):
    pass


class MetricUndefinedError(MiouError):
    """The metric has no defined value for these inputs."""


class BothEmpty(MetricUndefinedError):
    """Both masks empty; union (or size sum) is zero."""


class EmptyGroundTruth(MetricUndefinedError):
    pass


class EmptyDetection(MetricUndefinedError):
    pass


class EmptyMask(MetricUndefinedError):
    pass


class DegenerateRegression(MetricUndefinedError):
    """All cell counts equal one; the log-log slope carries no information."""
