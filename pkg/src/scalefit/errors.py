"""Exception types shared across the library."""


class DataError(ValueError):
    """Invalid records, malformed input files, or unmet operation preconditions."""


class DegenerateDataError(DataError):
    """Data too degenerate for the requested statistic (e.g. a single distinct scale)."""
