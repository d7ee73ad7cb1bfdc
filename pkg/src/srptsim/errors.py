"""Package exception types."""


class ConfigError(ValueError):
    """Invalid user input: parameter values, config files, CLI arguments."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance within budget."""
