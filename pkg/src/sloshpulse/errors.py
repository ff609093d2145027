"""Shared exception types."""


class ConfigurationError(ValueError):
    """Invalid configuration value (unsupported motor count, fluid that does not fit, ...)."""


class InputError(ValueError):
    """Bad runtime input: mismatched timestamps, empty sample lists, non-unit quaternions."""


class FormatError(ValueError):
    """Malformed file or wire payload. Carries a byte/line offset when known."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)
        self.offset = offset


class SimulationFault(RuntimeError):
    """Non-finite values or another unrecoverable state inside the solver."""

    def __init__(self, message, step_index=None):
        if step_index is not None:
            message = f"{message} (step {step_index})"
        super().__init__(message)
        self.step_index = step_index
