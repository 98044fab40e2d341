"""Shared exception types.

The CLI maps these onto exit codes: usage errors -> 1, parameter-domain and
numeric failures -> 2, endpoint failures -> 3.
"""


class ParameterDomainError(ValueError):
    """An input falls outside the mathematical domain of an operation."""


class NumericFailureError(RuntimeError):
    """A numeric procedure failed to converge or produced a non-finite value."""


class EndpointError(RuntimeError):
    """Base class for chat-completions endpoint failures."""


class AuthenticationError(EndpointError):
    """Credential missing or rejected; raised before any network call when absent."""


class EndpointTimeoutError(EndpointError):
    """Request exceeded the configured timeout after all retries."""


class EndpointHTTPError(EndpointError):
    """Endpoint returned a non-retryable or retry-exhausted HTTP error."""

    def __init__(self, message: str, status_code: int | None = None):
        super().__init__(message)
        self.status_code = status_code


class MalformedResponseError(EndpointError):
    """Endpoint response could not be parsed into a completion."""
