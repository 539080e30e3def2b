"""Exception hierarchy shared by all anglemap modules.

Exit-code mapping used by the CLI: data/shape/config problems carry 3,
numeric failures carry 4 (0 = success, 2 = usage, reserved by argparse).
"""


class AnglemapError(Exception):
    exit_code = 1


class DataError(AnglemapError):
    """Malformed input: bad shapes, bad config values, unreadable files."""

    exit_code = 3


class NumericError(AnglemapError):
    """Computation cannot proceed on the given numeric content."""

    exit_code = 4


class RankTooLarge(DataError):
    pass


class BadDims(DataError):
    pass


class SubsampleTooLarge(DataError):
    pass


class KTooLarge(DataError):
    pass


class BadN(DataError):
    pass


class BadSpec(DataError):
    pass


class RowMismatch(DataError):
    pass


class CsvFormatError(DataError):
    pass


class DegenerateTriangle(NumericError):
    pass


class DegenerateTriple(NumericError):
    pass


class AllZero(NumericError):
    pass


class EmptyBatch(NumericError):
    pass


class EmptyCollection(NumericError):
    pass


class ConstantVector(NumericError):
    pass


class NonFiniteLoss(NumericError):
    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"non-finite loss at iteration {iteration}")


class DegenerateSpread(UserWarning):
    """A principal component has zero spread; initialization falls back to jitter."""
