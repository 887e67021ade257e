"""Exception taxonomy. Exit codes match the CLI contract:
1 usage/config, 2 data, 3 training divergence."""


class IntervalNetError(Exception):
    exit_code = 1


class UsageError(IntervalNetError):
    """An API or CLI call that violates a precondition."""

    exit_code = 1


class ConfigError(IntervalNetError):
    """Invalid configuration: bad key, bad value, impossible combination."""

    exit_code = 1


class DataError(IntervalNetError):
    """Unreadable, malformed, or incompatible input data."""

    exit_code = 2


class DegenerateIntervalError(DataError):
    """Interval width below the representable minimum (|u - l| < eps)."""

    exit_code = 2


class DivergenceError(IntervalNetError):
    """Non-finite loss encountered during training."""

    exit_code = 3

    def __init__(self, message, phase=None, step=None):
        self.phase = phase
        self.step = step
        if phase is not None or step is not None:
            message = f"{message} (phase={phase}, step={step})"
        super().__init__(message)
