"""Exception types shared across the package."""


class SingspecError(Exception):
    """Base class for all package errors."""


class ConfigError(SingspecError):
    """Invalid scenario configuration. Carries the offending config path."""

    def __init__(self, path: str, message: str, line: int | None = None):
        self.path = path
        self.line = line
        where = f"{path} (line {line})" if line is not None else path
        super().__init__(f"{where}: {message}")


class BoundaryEvaluationError(SingspecError):
    """Evaluation requested on the real axis inside the support of the measure."""


class PrecisionError(SingspecError):
    """A configured accuracy bound cannot be met (names what would be required)."""


class GapError(SingspecError):
    """A declared spectral gap is missing, too narrow, or not centred at zero."""


class TailDecayError(SingspecError):
    """Declared tail-decay exponent incompatible with the requested norm."""


class SingularEvaluationError(SingspecError):
    """A matrix inversion met a numerically vanishing determinant."""


class DomainError(SingspecError):
    """Argument outside the half-plane / interval an operation is defined on."""
