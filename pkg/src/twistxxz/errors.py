"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Matrix or jet shapes are incompatible."""


class SingularError(ArithmeticError):
    """A formula hit one of its poles (or a degenerate parameter set)."""


class SingularJetError(SingularError):
    """Division by a jet whose constant term vanishes."""


class OnShellError(ValueError):
    """A root set required to satisfy the Bethe equations does not."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class OracleSizeError(ValueError):
    """The brute-force oracle was asked for a chain larger than it supports."""
