"""Exception hierarchy. The CLI maps DomainError to exit 1 and ConfigError to exit 2."""


class TracefnError(Exception):
    pass


class DomainError(TracefnError, ValueError):
    """Mathematically invalid input (bad modulus, singular matrix, ...)."""


class InvalidCharacterError(DomainError):
    pass


class FieldMismatchError(DomainError):
    pass


class ExtentError(DomainError):
    """Coefficient table too short for the requested sum."""


class ConfigError(TracefnError):
    """Bad configuration, unreadable file, unknown key."""
