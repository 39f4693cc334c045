"""Exception types shared across the package."""


class PhysicsError(RuntimeError):
    """A well-formed request that has no physical answer."""


class NonUniqueStationaryStateError(PhysicsError):
    pass


class ZeroIntensityError(PhysicsError):
    pass


class QuadratureError(PhysicsError):
    pass


class ConfigError(ValueError):
    """Invalid run configuration.

    ``line`` and ``column`` are 1-based positions in the config file when known.
    """

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column

    def __str__(self):
        msg = super().__str__()
        if self.line is not None:
            col = self.column if self.column is not None else 1
            return f"line {self.line}, column {col}: {msg}"
        return msg
