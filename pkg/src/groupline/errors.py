"""Exception types shared across the toolkit."""


class GrouplineError(Exception):
    """Base class for all toolkit errors."""


class ParseError(GrouplineError):
    """Malformed input file (bad date, missing field, empty stream, ...)."""


class SchemaError(GrouplineError):
    """A record violates the pair-file schema (unknown cut, bad label, ...)."""


class ConfigError(GrouplineError):
    """Invalid configuration value (negative lambda, bad window, ...)."""


class TierViolation(GrouplineError):
    """A scorer touched a field above its declared challenge tier."""


class MissingContentError(TierViolation):
    """A tier-3 scorer needs article content the record does not carry."""
