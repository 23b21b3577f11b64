"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: ConfigError -> 2,
DataError -> 3, DetectorError -> 4.
"""


class AnobenchError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(AnobenchError):
    """Malformed or inconsistent configuration (unknown keys, bad values)."""


class DataError(AnobenchError):
    """Problems with dataset files, schemas, labels, splits or score files."""


class DetectorError(AnobenchError):
    """A detector failed to fit or score (divergence, dimension mismatch)."""
