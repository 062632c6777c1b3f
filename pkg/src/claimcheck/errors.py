"""Exception taxonomy shared across the toolkit.

Grouped by who is expected to handle them: validation and configuration
errors are caller bugs, structural errors indicate corrupted in-memory
values, transport/backend errors are runtime failures of external systems
and carry enough metadata to decide on a retry.
"""

from __future__ import annotations


class ClaimCheckError(Exception):
    """Base class for all toolkit errors."""


class InputValidationError(ClaimCheckError, ValueError):
    """Rejected input: malformed, empty where forbidden, or over limits."""


class ConfigError(ClaimCheckError, ValueError):
    """Inconsistent or incomplete configuration."""


class StructuralError(ClaimCheckError):
    """A value violates its own structural invariants (e.g. token span gaps)."""


class IngestionError(ClaimCheckError):
    """A record collection cannot be indexed (e.g. duplicate canonical URLs)."""


class TransportError(ClaimCheckError):
    """A remote call failed at the network/HTTP level.

    `retryable` tells the caller whether another attempt may succeed;
    `attempts` records how many were already made.
    """

    def __init__(self, message: str, *, retryable: bool = True, attempts: int = 1):
        super().__init__(message)
        self.retryable = retryable
        self.attempts = attempts


class ThrottleError(TransportError):
    """The remote service asked us to slow down.

    `retry_after` is the server-advised delay in seconds, when given.
    """

    def __init__(self, message: str, *, retry_after: float | None = None, attempts: int = 1):
        super().__init__(message, retryable=True, attempts=attempts)
        self.retry_after = retry_after


class BackendError(ClaimCheckError):
    """A summarizer backend misbehaved (unreachable, bad response, runaway output)."""

    def __init__(self, message: str, *, retryable: bool = False, attempts: int = 1):
        super().__init__(message)
        self.retryable = retryable
        self.attempts = attempts
