"""Pydantic models for run configuration and for every CSV the harness writes.

RunConfig validates a whole configuration file against the preconditions of
the modules it drives before anything is computed. The row models validate
dataframes before they are written.
"""
from __future__ import annotations

import logging
import math
from typing import Literal, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.nlkg.spectral.multipliers import is_dyadic
from src.nlkg.theory.exponents import critical_regularity, is_wave_admissible

logger = logging.getLogger(__name__)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridSection(_Section):
    R: float = Field(30.0, gt=0, description="Domain radius")
    n: int = Field(1024, ge=8, description="Interior nodes, a power of two")

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, n: int) -> int:
        if n & (n - 1):
            raise ValueError(f"must be a power of two, got {n}")
        return n


class EvolutionSection(_Section):
    dt: float = Field(1e-3, gt=0)
    T: float = Field(10.0, ge=0)
    sample_stride: int = Field(10, ge=1)
    dealias_pad: int = Field(2, ge=1)
    boundary_guard: float = Field(0.75, gt=0, le=1)


class DataSection(_Section):
    kind: Literal["gaussian", "band_limited", "rough_spectral"] = "gaussian"
    amplitude: float = Field(1.0, ge=0)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    width: float = Field(1.0, gt=0)
    cutoff: float = Field(4.0, gt=0)
    spectral_slope: Optional[float] = None
    envelope_width: Optional[float] = Field(None, gt=0)


class DiagnosticsSection(_Section):
    morawetz: bool = True
    scattering: bool = True
    radial_sobolev: bool = True
    partition_threshold: float = Field(1.0, gt=0)
    checkpoints: Optional[list[float]] = None


class KernelSection(_Section):
    M_list: list[float] = Field(default_factory=lambda: [8.0, 16.0, 32.0])
    pairs: Optional[list[tuple[float, float]]] = Field(
        None, description="(q, r) pairs; the default set {(inf,2), (2/s,2/(1-s)), (4,4)} when omitted"
    )
    n_t: int = Field(12, ge=3)
    probe_T: Optional[float] = Field(None, gt=0)

    @field_validator("M_list")
    @classmethod
    def _dyadic_frequencies(cls, values: list[float]) -> list[float]:
        bad = [M for M in values if not is_dyadic(M)]
        if bad:
            raise ValueError(f"frequencies must be dyadic, got {bad}")
        return values

    @field_validator("pairs")
    @classmethod
    def _admissible_pairs(cls, pairs):
        for q, r in pairs or []:
            if not is_wave_admissible(q, r, 3)[0]:
                raise ValueError(f"(q, r) = ({q}, {r}) is not wave admissible in d = 3")
        return pairs


class OutputSection(_Section):
    dir: str = "out"
    trajectory: bool = True
    trajectory_file: str = "trajectory.nlkg"
    diagnostics_csv: str = "diagnostics.csv"


class RunConfig(_Section):
    """A complete run configuration."""

    p: float = Field(4.0, gt=3, lt=5)
    s: float = Field(0.95, gt=0, lt=1)
    N: float = 8.0
    N_list: list[float] = Field(default_factory=lambda: [4.0, 8.0, 16.0, 32.0])
    p_list: list[float] = Field(default_factory=lambda: [3.5, 4.0, 4.5])
    grid: GridSection = Field(default_factory=GridSection)
    evolution: EvolutionSection = Field(default_factory=EvolutionSection)
    data: DataSection = Field(default_factory=DataSection)
    diagnostics: DiagnosticsSection = Field(default_factory=DiagnosticsSection)
    kernel: KernelSection = Field(default_factory=KernelSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @field_validator("N")
    @classmethod
    def _dyadic_N(cls, N: float) -> float:
        if not (is_dyadic(N) and N > 1):
            raise ValueError(f"must be a dyadic number > 1, got {N}")
        return N

    @field_validator("N_list")
    @classmethod
    def _dyadic_increasing(cls, values: list[float]) -> list[float]:
        if any(not (is_dyadic(N) and N > 1) for N in values):
            raise ValueError(f"every N must be a dyadic number > 1, got {values}")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError(f"must be strictly increasing, got {values}")
        return values

    @field_validator("p_list")
    @classmethod
    def _p_range(cls, values: list[float]) -> list[float]:
        bad = [p for p in values if not 3 < p < 5]
        if bad:
            raise ValueError(f"every p must satisfy 3 < p < 5, got {bad}")
        return values

    @model_validator(mode="after")
    def _regularity_above_critical(self) -> "RunConfig":
        for p in [self.p, *self.p_list]:
            s_c = float(critical_regularity(float(p)))
            if not self.s > s_c:
                raise ValueError(f"s = {self.s} must exceed s_c(p={p}) = {s_c:.6g}")
        return self

    @property
    def n_samples(self) -> int:
        steps = math.floor(self.evolution.T / self.evolution.dt + 1e-9)
        return steps // self.evolution.sample_stride + 1


# ---------------------------------------------------------------------------
# CSV row contracts
# ---------------------------------------------------------------------------

class DiagnosticsRow(BaseModel):
    """Schema for diagnostics.csv rows."""

    t: float = Field(ge=0.0)
    E_u: float = Field(ge=0.0)
    E_Iu: float = Field(ge=0.0)
    Hs_pair: float = Field(ge=0.0)
    morawetz_potential_cum: float = Field(ge=0.0)
    origin_term_cum: float = Field(ge=0.0)
    R1_cum: float
    R2_cum: float
    radial_sobolev_ratio: float = Field(ge=0.0)


class SweepNRow(BaseModel):
    """Schema for sweep_n.csv rows; the slope row carries N = None."""

    row_kind: Literal["N", "slope"]
    N: Optional[float] = None
    delta_E_Iu: Optional[float] = None
    E_Iu0: Optional[float] = None
    R1: Optional[float] = None
    R2: Optional[float] = None
    slope: Optional[float] = None
    predicted_slope: Optional[float] = None


class SweepPRow(BaseModel):
    """Schema for sweep_p.csv rows."""

    p: float = Field(gt=3.0, lt=5.0)
    s_c: float
    s_threshold: float
    energy_drift: float = Field(ge=0.0)
    delta_E_Iu: float = Field(ge=0.0)
    morawetz_ratio: float = Field(ge=0.0)


class KernelProbeRow(BaseModel):
    """Schema for probe_kernel.csv rows."""

    M: float = Field(gt=0.0)
    pair: str
    q: float
    r: float
    m: float
    strichartz_ratio: float = Field(ge=0.0)
    envelope_exponent: Optional[float] = None
    envelope_amplitude: Optional[float] = None
    K_M_origin: float


def validate_dataframe(df: pd.DataFrame, model: type[BaseModel]) -> list[str]:
    """
    Validate each row of a DataFrame against a Pydantic model.

    Args:
        df: DataFrame to validate
        model: Pydantic model class to validate against

    Returns:
        List of error messages (empty if all rows are valid)
    """
    errors: list[str] = []

    for idx, row in df.iterrows():
        row_dict = row.to_dict()
        # NaN marks a not-applicable cell
        for key, value in row_dict.items():
            if pd.isna(value):
                row_dict[key] = None

        try:
            model.model_validate(row_dict)
        except ValidationError as e:
            errors.append(f"Row {idx}: {e}")

    logger.info("Validated %d rows against %s: %d errors", len(df), model.__name__, len(errors))
    return errors
