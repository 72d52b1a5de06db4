"""Exception hierarchy shared across the package.

The split matters at the CLI boundary: data/file problems exit with code 1,
violated call preconditions exit with code 2.
"""


class VwsimError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(VwsimError, ValueError):
    """A value is outside the domain an operation is defined on."""


class ContractError(VwsimError, ValueError):
    """Caller passed structurally inconsistent arguments (a programming error)."""


class PreconditionError(VwsimError, ValueError):
    """An operation was invoked in a state it cannot answer from."""


class ValidationError(VwsimError, ValueError):
    """Input data failed validation while being ingested."""


class FormatError(ValidationError):
    """A file is not in the expected on-disk format."""


class CompatibilityError(ValidationError):
    """Two artifacts that must belong together do not match."""


class UnknownWordError(VwsimError, KeyError):
    """Lookup of a word id that is not in the vocabulary."""
