"""Error types shared across the package."""


class ConfigError(ValueError):
    """Invalid experiment configuration (bad flag, key, or value)."""


class ConsistencyError(RuntimeError):
    """Two routes that must agree numerically did not.

    Raised when an internal cross-check fails, e.g. the two negativity
    routes disagree or probabilities come out negative beyond roundoff.
    """
