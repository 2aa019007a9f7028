"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: ConfigError -> 1,
DataError (and missing files) -> 2, anything unexpected -> 3.
"""


class ConfigError(Exception):
    """Invalid configuration: bad option values, inconsistent settings."""


class DataError(Exception):
    """Malformed or unusable input data (bad rows, missing entities, degenerate labels)."""


class UndefinedMetricError(Exception):
    """A metric has no defined value on the given inputs (e.g. single-class AUC)."""
