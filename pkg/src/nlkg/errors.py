"""Exception hierarchy for the NLKG simulator and its diagnostics.

The CLI maps these onto exit codes:
    ConfigError          -> 2
    NumericalFailure     -> 3
    RowContractError     -> 3
    TrajectoryFileError  -> 4
"""
from __future__ import annotations


class NlkgError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(NlkgError, ValueError):
    """A configuration value violates a module precondition."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class GridError(NlkgError, ValueError):
    """Invalid radial grid or fields living on mismatched grids."""


class SymbolError(NlkgError, ValueError):
    """A multiplier symbol produced non-finite values on the resolved band."""


class NumericalFailure(NlkgError, ArithmeticError):
    """A computation produced non-finite numbers."""


class BlowUpError(NumericalFailure):
    """The evolution produced a non-finite field."""

    def __init__(self, t: float, message: str = "non-finite field"):
        self.t = t
        super().__init__(f"{message} at t={t:.6g}")


class SampleTimeError(NlkgError, KeyError):
    """A requested time is not one of the trajectory's sample instants."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "time not sampled"


class AdmissibilityError(NlkgError, ValueError):
    """An exponent pair is not wave admissible at the requested level."""


class ExponentRangeError(NlkgError, ValueError):
    """(p, s) lies outside the range where the exponent formulas apply."""


class QuadratureError(NumericalFailure):
    """Oscillatory quadrature did not converge within its panel budget."""


class InsufficientSamplesError(NlkgError, ValueError):
    """Too few samples/checkpoints for the requested fit or report."""


class ZeroFieldError(NlkgError, ValueError):
    """A quantity normalised by the field's own norm was asked of the zero field."""


class InconsistentBudgetError(NlkgError, ValueError):
    """A Morawetz ratio has a zero denominator but nonzero numerator."""


class TrajectoryFileError(NlkgError, OSError):
    """A trajectory file is malformed or has the wrong magic/version."""


class RowContractError(NlkgError, ValueError):
    """Output rows failed their pydantic contract."""
