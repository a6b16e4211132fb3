"""Closed-form exponent calculus for the scattering threshold and wave admissibility.

Every formula is evaluated in exact rational arithmetic (fractions.Fraction)
when p and s are given as int, Fraction or decimal strings, and in floating
point otherwise. The two branch formulas of each branched quantity overlap
at p = 4, where they must agree exactly.

    s_c          = 3/2 - 2/(p-1)
    s_threshold  = 1 - (5-p)(p-3) / (2(p-1)(p-2))      3 < p <= 4
                   1 - (5-p)^2    / (2(p-1)(6-p))      4 <= p < 5
    theta2       = (p+2)(p-3) / ((p-1)(p-2))           3 < p <= 4
                   (p+2)(5-p) / ((6-p)(p-1))           4 <= p < 5
    theta1       = (2s-1)(4-p) / (s(p-1)(p-2))         3 < p <= 4
                   (4s-1)(p-4) / (s(p-1)(6-p))         4 <= p < 5
    theta3       = (4-p) / (s(p-1)(p-2))               3 < p <= 4
                   (p-4) / (s(p-1)(6-p))               4 <= p < 5
    theta        = 1 / (s(p-1))
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from src.nlkg.errors import AdmissibilityError, ExponentRangeError

Number = Union[Fraction, float]

# Float comparisons in the admissibility cone (the (2/s, 2/(1-s)) pair sits on its edge).
CONE_TOL = 1e-12


def as_number(x) -> Number:
    """Fraction for int/Fraction/str inputs, float otherwise."""
    if isinstance(x, bool):
        raise TypeError("booleans are not exponents")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip().lower()
        if text in ("inf", "infinity", "oo"):
            return math.inf
        return Fraction(text)
    return float(x)


def _recip(x: Number) -> Number:
    if x == math.inf:
        return Fraction(0)
    if x == 0:
        return math.inf
    return 1 / x


def critical_regularity(p) -> Number:
    """s_c = 3/2 - 2/(p-1), defined for any p > 1."""
    p = as_number(p)
    if not p > 1:
        raise ExponentRangeError(f"critical regularity needs p > 1, got {p}")
    return Fraction(3, 2) - 2 / (p - 1)


def threshold_branches(p) -> tuple[Number, Number]:
    """Both printed formulas for s_threshold, evaluated at p."""
    p = as_number(p)
    low = 1 - (5 - p) * (p - 3) / (2 * (p - 1) * (p - 2))
    high = 1 - (5 - p) ** 2 / (2 * (p - 1) * (6 - p))
    return low, high


def _branch_values(p: Number, s: Number, branch: str) -> tuple[Number, Number, Number]:
    if branch == "low":
        denom = (p - 1) * (p - 2)
        theta1 = (2 * s - 1) * (4 - p) / (s * denom)
        theta2 = (p + 2) * (p - 3) / denom
        theta3 = (4 - p) / (s * denom)
    else:
        denom = (p - 1) * (6 - p)
        theta1 = (4 * s - 1) * (p - 4) / (s * denom)
        theta2 = (p + 2) * (5 - p) / denom
        theta3 = (p - 4) / (s * denom)
    return theta1, theta2, theta3


def theta_components(p, s) -> tuple[Number, Number, Number]:
    """(theta1, theta2, theta3) on the branch containing p; no range checks."""
    p, s = as_number(p), as_number(s)
    return _branch_values(p, s, "low" if p <= 4 else "high")


def holder_identity_defects(p, s) -> tuple[Number, Number]:
    """Defects of the two interpolation identities behind the low-frequency bound.

    On 3 < p <= 4 the interpolation uses L^2 endpoints:
        1/(2(p-1)) = theta1/2 + theta2/(p+2) + theta3(1-s)/2
    on 4 <= p < 5 it uses L^6 endpoints:
        1/(2(p-1)) = theta1/6 + theta2/(p+2) + theta3(1-s)/6
    and on both
        1/(2(p-1)) = theta2/(p+2) + theta3*s/2
    """
    p, s = as_number(p), as_number(s)
    theta1, theta2, theta3 = theta_components(p, s)
    target = 1 / (2 * (p - 1))
    endpoint = 2 if p <= 4 else 6
    first = theta1 / endpoint + theta2 / (p + 2) + theta3 * (1 - s) / endpoint - target
    second = theta2 / (p + 2) + theta3 * s / 2 - target
    return first, second


@dataclass(frozen=True)
class ExponentReport:
    """Closed-form exponents for one (p, s)."""
    p: Number
    s: Number
    s_c: Number
    s_threshold: Number
    s_threshold_low: Number
    s_threshold_high: Number
    theta1: Number
    theta2: Number
    theta3: Number
    theta: Number
    acl_min_regularity: Number
    acl_decay_exponent: Number
    partition_energy_exponent: Number

    @property
    def above_threshold(self) -> bool:
        return self.s > self.s_threshold


def exponent_report(p, s) -> ExponentReport:
    p, s = as_number(p), as_number(s)
    if not 3 < p < 5:
        raise ExponentRangeError(f"p must satisfy 3 < p < 5, got {p}")
    if not 0 < s < 1:
        raise ExponentRangeError(f"s must satisfy 0 < s < 1, got {s}")

    low, high = threshold_branches(p)
    if p == 4 and low != high:
        raise ExponentRangeError(f"threshold branches disagree at p = 4: {low} vs {high}")
    theta1, theta2, theta3 = theta_components(p, s)
    if p == 4 and _branch_values(p, s, "low") != _branch_values(p, s, "high"):
        raise ExponentRangeError("theta branches disagree at p = 4")
    for name, value in (("theta1", theta1), ("theta2", theta2), ("theta3", theta3)):
        if not 0 <= value <= 1:
            raise ExponentRangeError(f"{name} = {value} lies outside [0, 1] for p={p}, s={s}")

    return ExponentReport(
        p=p,
        s=s,
        s_c=critical_regularity(p),
        s_threshold=low if p <= 4 else high,
        s_threshold_low=low,
        s_threshold_high=high,
        theta1=theta1,
        theta2=theta2,
        theta3=theta3,
        theta=1 / (s * (p - 1)),
        acl_min_regularity=(3 * p - 5) / (2 * p),
        acl_decay_exponent=(5 - p) / 2,
        partition_energy_exponent=(p + 2) * (1 - theta2) / (2 * theta2) + Fraction(3, 2),
    )


# -- admissibility ----------------------------------------------------------


def admissibility_level(q, r, d: int = 3) -> Number:
    """m from the scaling relation 1/q + d/r = d/2 - m."""
    q, r = as_number(q), as_number(r)
    return Fraction(d, 2) - _recip(q) - d * _recip(r)


def is_wave_admissible(q, r, d: int = 3) -> tuple[bool, Number]:
    """Membership, cone condition and endpoint exclusion for (q, r) in dimension d.

    Returns (admissible, m). m is computed from the scaling relation whether
    or not the pair is admissible.
    """
    if d < 2:
        raise AdmissibilityError(f"dimension must be >= 2, got {d}")
    q, r = as_number(q), as_number(r)
    m = admissibility_level(q, r, d)
    if not (q > 2 and 2 <= r < math.inf):
        return False, m
    cone = _recip(q) + Fraction(d - 1, 2) * _recip(r) - Fraction(d - 1, 4)
    tol = 0 if isinstance(cone, Fraction) else CONE_TOL
    if cone > tol:
        return False, m
    if d > 3 and q == 2 and r == Fraction(2 * (d - 1), d - 3):
        return False, m
    return True, m


def is_dual_inhomogeneous(q_tilde, r_tilde, q, r, d: int = 3) -> bool:
    """Hölder duality plus the inhomogeneous scaling condition."""
    q_tilde, r_tilde, q, r = (as_number(x) for x in (q_tilde, r_tilde, q, r))
    if not (q > 2 and r >= 2):
        return False
    if not (q_tilde >= 1 and r_tilde >= 1):
        return False

    def close(a, b) -> bool:
        if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
            return a == b
        return abs(float(a) - float(b)) <= CONE_TOL

    return (
        close(_recip(q_tilde) + _recip(q), 1)
        and close(_recip(r_tilde) + _recip(r), 1)
        and close(_recip(q_tilde) + d * _recip(r_tilde) - 2, _recip(q) + d * _recip(r))
    )


def dual_pair(q, r) -> tuple[Number, Number]:
    """Hölder conjugates (q', r')."""
    q, r = as_number(q), as_number(r)
    return _recip(1 - _recip(q)), _recip(1 - _recip(r))
