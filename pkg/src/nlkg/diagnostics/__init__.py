# src/nlkg/diagnostics package
from src.nlkg.diagnostics.functionals import (
    almost_conservation_sweep,
    energy,
    hs_pair_norm,
    initial_mollified_growth,
    mollified_energy,
    partition_intervals,
    spacetime_norm,
    z_norm,
    z_total,
)
from src.nlkg.diagnostics.params import AdmissiblePair, IMethodParams, default_pair_set
