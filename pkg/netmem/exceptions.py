"""
Custom exception classes for the network memory simulator.
"""

class NetMemError(Exception):
    """Base exception for netmem errors."""
    pass


class ConfigurationError(NetMemError):
    """Raised when there's an issue with configuration files or experiment settings."""
    pass


class ValidationError(NetMemError, ValueError):
    """Raised when input validation fails."""
    pass


class FileIOError(NetMemError):
    """Raised when file I/O operations fail."""
    pass


class LoggingError(NetMemError):
    """Raised when logging setup fails."""
    pass


class GraphGenerationError(NetMemError):
    """Raised when no connected G(N,p) sample was drawn within the rejection limit."""
    pass


class UnreachableVertexError(NetMemError):
    """Raised when a BFS does not reach every vertex (graph is not connected)."""
    pass


class UnknownMemoryError(ValidationError):
    """Raised when a vertex id is not one of the deployment's memories."""
    pass


class InvalidDeltaError(ValidationError):
    """Raised when the radius shrink parameter is outside [0, 1 - 1/g)."""
    pass


class NonErgodicChainError(NetMemError):
    """Raised when a sampled Markov chain has no unique stationary distribution."""
    pass


class SymbolOutOfRangeError(ValidationError):
    """Raised when a sequence holds a symbol outside the alphabet."""
    pass


class DecodeMismatchError(NetMemError):
    """Raised when a decoded sequence differs from the encoded one."""
    pass


class OverheadBudgetExceededError(NetMemError):
    """Raised when the arithmetic coder spends more than its overhead budget."""
    pass


class InsufficientSourcesError(ValidationError):
    """Raised when too few sources were sampled for the requested quantile."""
    pass
