"""Exception hierarchy shared by all modules."""


class HeliumQDError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HeliumQDError, ValueError):
    """Argument outside the mathematical or physical domain of an operation."""


class PoleError(DomainError):
    """Argument sits on a pole of a special function."""


class AccuracyError(HeliumQDError, ArithmeticError):
    """No available method reaches the required accuracy."""


class LimitError(HeliumQDError, ValueError):
    """Request exceeds a hard size limit."""


class ConfigError(HeliumQDError, ValueError):
    """Invalid configuration or grid specification."""


class ConvergenceError(HeliumQDError, RuntimeError):
    """Iterative procedure failed to converge."""


class DatasetError(HeliumQDError, ValueError):
    """Malformed input dataset; the message carries line/column context."""
