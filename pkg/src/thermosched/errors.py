"""Exception types shared across the package."""


class ThermoschedError(Exception):
    """Base class for all package errors."""


class ConfigError(ThermoschedError):
    """Invalid static configuration (site specs, curves, water parameters)."""


class IngestError(ThermoschedError):
    """Malformed or incomplete input file; message carries the offending row."""


class ContractError(ThermoschedError):
    """Caller violated an operation's precondition."""


class InfeasibleError(ThermoschedError):
    """No assignment satisfies the capacity constraints."""
