"""Error types raised across the package.

Every error carries a stable machine-parsable ``code`` so the CLI can report
failures uniformly (``error <CODE>: message`` on stderr, non-zero exit).
"""

from __future__ import annotations


class CollabnetError(Exception):
    """Base class for all errors raised by this package."""

    code = "E_GENERIC"


class SchemaError(CollabnetError):
    """An input file does not match its documented schema."""

    code = "E_SCHEMA"


class UnknownCountryError(CollabnetError):
    """A country code appears in count data but not in the metadata table."""

    code = "E_UNKNOWN_COUNTRY"


class UnknownRegionError(CollabnetError):
    """A metadata row declares a region outside the declared region set."""

    code = "E_UNKNOWN_REGION"


class NegativeCountError(CollabnetError):
    """A publication or collaboration count is negative."""

    code = "E_NEGATIVE_COUNT"


class MergeCollisionError(CollabnetError):
    """A merge target collides with an existing distinct country."""

    code = "E_MERGE_COLLISION"


class TooFewCountriesError(CollabnetError):
    """A panel operation would leave fewer than two countries."""

    code = "E_TOO_FEW_COUNTRIES"


class ZeroOutputPeriodError(CollabnetError):
    """A period has zero total publications, so shares are undefined."""

    code = "E_ZERO_OUTPUT_PERIOD"


class EmptyNetworkError(CollabnetError):
    """A network has no edge weight at all (2m = 0)."""

    code = "E_EMPTY_NETWORK"


class NodeSetMismatchError(CollabnetError):
    """Two partitions do not cover the same node set."""

    code = "E_NODE_SET_MISMATCH"


class InvalidPartitionError(CollabnetError):
    """A partition's labels are not dense integers 0..c-1."""

    code = "E_INVALID_PARTITION"


class TooLargeForEnumerationError(CollabnetError):
    """Exhaustive partition enumeration was asked for too many nodes."""

    code = "E_TOO_LARGE_FOR_ENUMERATION"


class ConfigError(CollabnetError):
    """A configuration value is missing or inconsistent."""

    code = "E_CONFIG"
