"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid user input: unknown names, bad shapes, inconsistent parameters."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to converge or hit a degenerate case."""
