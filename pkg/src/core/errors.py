"""
Exception types raised by the photon-dimer core
"""

from typing import Optional


class PhotonDimerError(Exception):
    """Base class for all errors raised by photon-dimer"""


class ParameterError(PhotonDimerError, ValueError):
    """Invalid physical or numerical parameter"""

    field: Optional[str]

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class DegenerateParametersError(ParameterError):
    """The two-photon boundary system is singular"""


class ContractError(PhotonDimerError, ValueError):
    """A caller violated an operation's precondition"""


class QuadratureError(PhotonDimerError, RuntimeError):
    """Adaptive quadrature failed to reach the requested accuracy

    Attributes:
        estimate: best value obtained before giving up
        error: absolute error estimate reported by the rule
        neval: number of integrand evaluations
        intervals: number of subintervals in the final partition
    """

    def __init__(self, message: str, estimate=None, error: float = float("nan"),
                 neval: int = 0, intervals: int = 0):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.neval = neval
        self.intervals = intervals

    def __str__(self) -> str:
        base = super().__str__()
        return f"{base} (error={self.error:.3g}, neval={self.neval}, intervals={self.intervals})"


class QuadratureWarning(UserWarning):
    """Quadrature converged only to a loose tolerance"""


class NoSignalError(PhotonDimerError, ArithmeticError):
    """A normalizing intensity vanished"""


class SteadyStateError(PhotonDimerError, RuntimeError):
    """The master equation has no unique steady state, or is too large to solve"""


class ConfigError(PhotonDimerError, ValueError):
    """Malformed configuration file or override"""

    def __init__(self, message: str, source: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None,
                 key: Optional[str] = None):
        location = source or ""
        if line is not None:
            location += f":{line}"
            if column is not None:
                location += f":{column}"
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.source = source
        self.line = line
        self.column = column
        self.key = key
