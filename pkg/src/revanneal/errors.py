"""Exception types shared across the package."""


class RevannealError(Exception):
    """Base class for package errors."""


class DataError(RevannealError):
    """Malformed input: bad instance files, dimension mismatches, parse failures."""


class SizeError(DataError):
    """Problem exceeds an enumeration or qubit bound."""


class AccuracyError(RevannealError):
    """A numerical tolerance was violated (e.g. state-vector norm drift)."""
