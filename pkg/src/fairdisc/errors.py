"""Shared exception types."""


class ValidationError(ValueError):
    """Bad domain input: malformed distribution, dimension mismatch, bad config.

    The CLI maps this to exit code 2. Genuine I/O failures (missing files,
    unreadable paths) stay OSError and map to exit code 3.
    """
