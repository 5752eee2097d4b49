"""Exception hierarchy shared across the package."""


class McTspError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInputError(McTspError):
    """Input refers to unknown vertices or is otherwise not well formed."""


class StructuralError(McTspError):
    """A solution object violates its structural invariants."""


class ParameterError(McTspError):
    """A parameter is outside its admissible range."""


class CapExceededError(McTspError):
    """An enumeration was refused because the instance exceeds the configured cap."""


class FormulaDomainError(McTspError):
    """A ratio formula was evaluated outside its domain of validity."""


class SchemaError(McTspError):
    """A file does not conform to the documented schema."""
