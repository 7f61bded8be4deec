"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2, data
problems exit 3, anything else exits 4.
"""


class TgclError(Exception):
    """Base class for all package errors."""


class ConfigurationError(TgclError):
    """Invalid option combination or hyperparameter."""


class DataError(TgclError):
    """Invalid input data (files or in-memory structures)."""


class ParseError(DataError):
    """A data file could not be parsed; message carries the line number."""


class SchemaError(DataError):
    """Structurally valid file with inconsistent or out-of-range content."""


class DomainError(DataError):
    """An operation was applied to arguments outside its domain."""


class TransferError(DataError):
    """A recorded curriculum cannot be applied to the target dataset."""
