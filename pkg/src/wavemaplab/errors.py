"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point or argument lies outside the region where a map is defined."""


class ConfigError(ValueError):
    """Invalid numerical or model configuration."""


class IntegrationError(RuntimeError):
    """An ODE integration failed (step-size underflow, non-finite state)."""
