"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so keep the hierarchy flat
and the categories disjoint.
"""


class QucommitError(Exception):
    """Base class for all package-specific errors."""


class InstanceFormatError(QucommitError):
    """An instance document does not conform to the schema (names the field)."""


class ValidationError(QucommitError):
    """A structurally valid input violates a domain invariant."""


class ConfigurationError(QucommitError):
    """Resolved parameters are inconsistent (e.g. slack range too small)."""


class CapacityError(QucommitError):
    """Requested problem size exceeds what dense simulation supports."""


class PartitionError(QucommitError):
    """A circuit's declared register partition is missing or violated."""
