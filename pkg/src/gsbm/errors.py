"""Exception types shared by the file-format and CLI layers."""


class UsageError(Exception):
    """Bad command line, missing or invalid configuration."""


class DataError(Exception):
    """Unreadable or inconsistent input data."""
