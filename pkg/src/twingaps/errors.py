"""Exception types shared across the package.

The CLI maps these onto exit codes: usage problems exit 2, data/format
problems exit 3, resource limits exit 4.
"""


class TwingapsError(Exception):
    """Base class for package-specific failures."""


class SequencingError(TwingapsError):
    """Segments consumed out of order, or a checkpoint requested at an N
    the scan has not consumed exactly."""


class DegenerateRegimeError(TwingapsError):
    """Closed-form prediction undefined (pi <= 2*pi2, or a log argument
    went nonpositive); only possible at tiny N."""


class InsufficientDataError(TwingapsError):
    """Fewer than two usable histogram bins survive the trimming protocol."""


class ConsistencyError(TwingapsError):
    """Inputs that must refer to the same N do not."""


class SchemaError(TwingapsError):
    """A resume or checkpoint file does not match the documented schema."""


class BoundTooLargeError(TwingapsError):
    """Requested bound exceeds the supported 2^44 ceiling."""
