"""Exception and warning types shared by the numerical modules."""

from __future__ import annotations


class ModsurfError(Exception):
    """Base class for every error raised by modsurf."""


class PoleError(ModsurfError, ZeroDivisionError):
    """Evaluation requested at a pole of a meromorphic function."""


class DomainError(ModsurfError, ValueError):
    """Argument outside the domain of an operation."""


class NonHyperbolicError(DomainError):
    """Matrix with |trace| <= 2 passed where a hyperbolic element is required."""


class CoefficientRangeError(DomainError, IndexError):
    """A Fourier coefficient beyond the stored truncation was requested."""


class ConvergenceError(ModsurfError, ArithmeticError):
    """Series or product evaluated outside its safe region of convergence."""


class IterationLimitError(ModsurfError, RuntimeError):
    """An iterative procedure did not terminate within its step budget."""


class SingularSystemError(ModsurfError, ArithmeticError):
    """Dense factorisation of a collocation system failed."""


class SchemaError(ModsurfError, ValueError):
    """A persisted file does not match the expected versioned schema."""


class ConfigError(ModsurfError, ValueError):
    """Invalid configuration file or override."""


class ModsurfWarning(UserWarning):
    """Base class for non-fatal numerical conditions."""


class ConditioningWarning(ModsurfWarning):
    pass


class TruncationWarning(ModsurfWarning):
    pass


class NearZetaZeroWarning(ModsurfWarning):
    pass


class TruncatedSpectrumWarning(ModsurfWarning):
    pass
