"""Per-sample diagnostics collected while a trajectory is evolved."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from src.nlkg.diagnostics.functionals import apply_i, energy, hs_pair_norm
from src.nlkg.diagnostics.morawetz import MorawetzAccumulator, radial_sobolev_ratio
from src.nlkg.diagnostics.params import IMethodParams
from src.nlkg.evolution.state import State

RECORD_COLUMNS = [
    "t",
    "E_u",
    "E_Iu",
    "Hs_pair",
    "morawetz_potential_cum",
    "origin_term_cum",
    "R1_cum",
    "R2_cum",
    "radial_sobolev_ratio",
]


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    E_u: float
    E_Iu: float
    Hs_pair: float
    origin_value_Iu: float
    morawetz_potential_cum: float
    origin_term_cum: float
    R1_cum: float
    R2_cum: float
    radial_sobolev_ratio: float

    def as_row(self) -> dict:
        row = asdict(self)
        return {col: row[col] for col in RECORD_COLUMNS}


class DiagnosticsObserver:
    """Evolution observer turning each stored State into a DiagnosticsRecord."""

    def __init__(self, prm: IMethodParams, dealias_pad: int = 2):
        self.prm = prm
        self.dealias_pad = dealias_pad
        self.morawetz = MorawetzAccumulator(prm, dealias_pad)
        self.records: list[DiagnosticsRecord] = []

    def __call__(self, st: State) -> None:
        sample = self.morawetz.add(st)
        ist = apply_i(st, self.prm)
        ratio = 0.0 if ist.u.is_zero() else radial_sobolev_ratio(ist.u)
        self.records.append(DiagnosticsRecord(
            t=st.t,
            E_u=energy(st, self.prm.p, self.dealias_pad),
            E_Iu=energy(ist, self.prm.p, self.dealias_pad),
            Hs_pair=hs_pair_norm(st, self.prm.s),
            origin_value_Iu=sample.origin_value,
            morawetz_potential_cum=self.morawetz.weighted_potential,
            origin_term_cum=self.morawetz.origin_term,
            R1_cum=self.morawetz.R1,
            R2_cum=self.morawetz.R2,
            radial_sobolev_ratio=ratio,
        ))

    @property
    def sup_E_Iu(self) -> float:
        return max((rec.E_Iu for rec in self.records), default=0.0)
