"""Exception types shared across the platform."""


class McpIntelError(Exception):
    """Base class for all platform errors."""


class ValidationError(McpIntelError, ValueError):
    """A value violates its declared domain or an operation precondition."""


class ParseError(McpIntelError):
    """A data file or feed payload could not be parsed."""


class UnknownIdError(McpIntelError, KeyError):
    """Lookup of an id that is not present in a registry or store."""

    def __init__(self, entity_id: str):
        super().__init__(entity_id)
        self.entity_id = entity_id

    def __str__(self) -> str:
        return f"unknown id: {self.entity_id}"


class ConfigurationError(McpIntelError):
    """Missing or inconsistent configuration (including credentials)."""


class GatewayError(McpIntelError):
    """Completion provider failure after bounded retries."""


class ReplayMismatchError(McpIntelError):
    """A replayed request did not match the next recorded transcript entry."""
