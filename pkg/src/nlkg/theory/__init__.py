from src.nlkg.theory.exponents import (
    ExponentReport,
    critical_regularity,
    dual_pair,
    exponent_report,
    holder_identity_defects,
    is_dual_inhomogeneous,
    is_wave_admissible,
    theta_components,
)

__all__ = [
    "ExponentReport",
    "critical_regularity",
    "dual_pair",
    "exponent_report",
    "holder_identity_defects",
    "is_dual_inhomogeneous",
    "is_wave_admissible",
    "theta_components",
]
