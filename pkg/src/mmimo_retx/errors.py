"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid argument value or shape."""


class ConfigError(ParameterError):
    """Invalid simulation configuration (bad key, bad value, bad file)."""


class DegeneracyError(ArithmeticError):
    """A probability column or pair collapsed to zero during decoding."""
