"""Error taxonomy shared across the package.

Plain ``ValueError`` is used for bad arguments to individual operations;
the classes here mark condition families the CLI maps to exit codes.
"""


class ConfigError(ValueError):
    """Invalid run configuration (bad key, bad value, bad mode). Exit code 2."""


class DataError(RuntimeError):
    """Unreadable or inconsistent input data. Exit code 3."""


class FormatError(DataError):
    """Structurally invalid file contents (bad magic, truncated payload, bad row)."""


class NotFoundError(DataError):
    """A requested frame, feature kind, or file is absent."""


class TrackingError(RuntimeError):
    """Degenerate tracking state (search region has left the image)."""


class InvariantError(RuntimeError):
    """An internal invariant was violated. Exit code 4."""
