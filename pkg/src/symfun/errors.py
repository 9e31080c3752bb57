"""Exception types shared across the package."""


class SymfunError(Exception):
    """Base class for all package errors."""


class DomainError(SymfunError, ValueError):
    """An input lies outside the domain of an operation."""


class FramingError(SymfunError, ValueError):
    """A bit stream does not start with a valid codeword."""


class ResourceError(SymfunError, RuntimeError):
    """An enumeration would exceed the configured size guard."""


class ProtocolError(SymfunError, RuntimeError):
    """Internal protocol invariant broken (causality, ambiguity, decoding)."""


class NetworkError(SymfunError, ValueError):
    """Malformed or invalid network description."""
