"""I-method parameters and admissible exponent pairs."""
from __future__ import annotations

import math
from dataclasses import dataclass

from src.nlkg.errors import AdmissibilityError, ConfigError
from src.nlkg.spectral.multipliers import MultiplierSymbol, is_dyadic
from src.nlkg.theory.exponents import critical_regularity, is_wave_admissible

# Levels m of two pairs agree when they differ by less than this.
LEVEL_TOL = 1e-12


@dataclass(frozen=True)
class IMethodParams:
    """
    Parameters of the smoothing operator I.

    N:
        Dyadic frequency (> 1) below which I is the identity.
    s:
        Regularity of the data, s_c(p) < s < 1.
    p:
        Nonlinearity exponent, 3 < p < 5.
    """
    N: float
    s: float
    p: float

    def __post_init__(self) -> None:
        if not 3.0 < self.p < 5.0:
            raise ConfigError("p", f"must satisfy 3 < p < 5, got {self.p}")
        if not (is_dyadic(self.N) and self.N > 1):
            raise ConfigError("N", f"must be a dyadic number > 1, got {self.N}")
        s_c = float(critical_regularity(float(self.p)))
        if not s_c < self.s < 1.0:
            raise ConfigError("s", f"must satisfy s_c(p) = {s_c:.6g} < s < 1, got {self.s}")

    @property
    def symbol(self) -> MultiplierSymbol:
        return MultiplierSymbol.i_symbol(self.N, self.s)

    def with_N(self, N: float) -> "IMethodParams":
        return IMethodParams(N, self.s, self.p)


@dataclass(frozen=True)
class AdmissiblePair:
    """A wave-admissible (q, r) in three dimensions with its level m."""
    q: float
    r: float
    m: float

    @classmethod
    def of(cls, q: float, r: float) -> "AdmissiblePair":
        _, m = is_wave_admissible(float(q), float(r), 3)
        return cls(float(q), float(r), float(m))

    def __post_init__(self) -> None:
        ok, m = is_wave_admissible(self.q, self.r, 3)
        if not ok:
            raise AdmissibilityError(f"(q, r) = ({self.q}, {self.r}) is not wave admissible in d = 3")
        if abs(float(m) - self.m) > LEVEL_TOL:
            raise AdmissibilityError(f"(q, r) = ({self.q}, {self.r}) has level {float(m)}, not {self.m}")

    @property
    def label(self) -> str:
        q = "inf" if math.isinf(self.q) else f"{self.q:g}"
        return f"({q},{self.r:g})"

    def at_level(self, m: float) -> bool:
        return abs(self.m - m) <= LEVEL_TOL


def default_pair_set(s: float) -> list[AdmissiblePair]:
    """{(inf, 2), (2/s, 2/(1-s)), (4, 4)}: levels 0, s and 1/2."""
    return [
        AdmissiblePair.of(math.inf, 2.0),
        AdmissiblePair.of(2.0 / s, 2.0 / (1.0 - s)),
        AdmissiblePair.of(4.0, 4.0),
    ]
