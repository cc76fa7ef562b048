"""
Exception hierarchy for the q-Freud toolkit

Every failure raised by the library derives from QFreudError so callers (the
CLI in particular) can separate computation errors from programming errors.
"""
from typing import Any, Optional


class QFreudError(Exception):
    """Base class for library failures"""


class ConfigurationError(QFreudError, ValueError):
    """Invalid model parameters or inconsistent options"""


class SeriesDivergenceError(QFreudError):
    """A truncated q-series failed to decay"""

    def __init__(self, message: str, terms: int = 0):
        super().__init__(message)
        self.terms = terms


class LatticeError(QFreudError, ValueError):
    """A point is not on the q-lattice, or a lattice value is not finite"""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class DifferenceAtZeroError(QFreudError):
    """D_q evaluated at 0 without a derivative-at-zero rule"""


class WeightPoleError(QFreudError):
    """The weight has a pole at the requested point"""


class PrecisionExhaustedError(QFreudError):
    """Orthogonalization produced a non-positive squared recurrence coefficient"""

    def __init__(self, index: int, value: Any):
        super().__init__(
            f"a_{index}^2 = {value} is not positive; increase digits or lower N"
        )
        self.index = index
        self.value = value


class InterpolationError(QFreudError):
    """Not enough distinct lattice nodes to recover polynomial coefficients"""


class InvalidSequenceError(QFreudError, ValueError):
    """A coefficient sequence violates y_0 = 0 or positivity"""


class SingularityError(QFreudError):
    """A division in the forward recurrence hit a vanishing factor"""

    def __init__(self, index: int, factor: str, value: Any):
        super().__init__(f"singular step at n={index}: {factor} = {value}")
        self.index = index
        self.factor = factor
        self.value = value


class VariantMismatchError(QFreudError, ValueError):
    """Asymmetric-form variant incompatible with the model parameter c"""


class DiscriminantError(QFreudError):
    """No admissible positive root for f_n or g_n"""

    def __init__(self, message: str, n: int, x: Any, y: Any, position: Optional[str] = None):
        super().__init__(f"{message} (n={n}, x={x}, y={y}{', ' + position if position else ''})")
        self.n = n
        self.x = x
        self.y = y
        self.position = position


class NonConvergenceError(QFreudError):
    """Bracket iteration stopped before reaching the requested width"""

    def __init__(self, report: Any, sequence: Any = None):
        super().__init__(
            f"bracket width {report.width} after {report.iterations} iterations"
        )
        self.report = report
        self.sequence = sequence


class PoleError(QFreudError):
    """Argument coincides with a pole of a rational right-hand side"""


class CrossCheckError(QFreudError):
    """Two independent evaluations of the same quantity disagree"""
