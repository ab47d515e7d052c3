"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """Invalid scenario, solver or CLI configuration."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class SolverError(RuntimeError):
    """A numerical solve could not produce a usable result."""


class InstanceTooLargeError(ValueError):
    """Instance exceeds the enumeration bound of the exhaustive oracle."""
