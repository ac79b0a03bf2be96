"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class ConfigError(ValueError):
    """A run configuration is malformed (unknown field, bad value, missing key)."""


class NumericsError(RuntimeError):
    """The time stepper produced a non-finite value."""

    def __init__(self, message: str, cell_index: int | None = None):
        super().__init__(message)
        self.cell_index = cell_index
