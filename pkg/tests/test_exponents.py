"""Tests for the closed-form exponent calculus and wave admissibility."""
import math
from fractions import Fraction

import numpy as np
import pytest

from src.nlkg.errors import ExponentRangeError
from src.nlkg.theory.exponents import (
    admissibility_level,
    as_number,
    critical_regularity,
    dual_pair,
    exponent_report,
    holder_identity_defects,
    is_dual_inhomogeneous,
    is_wave_admissible,
    theta_components,
    threshold_branches,
)


def test_branches_meet_at_p_four():
    report = exponent_report(4, "19/20")
    assert report.s_c == Fraction(5, 6)
    assert report.s_threshold_low == report.s_threshold_high == Fraction(11, 12)
    assert (report.theta1, report.theta2, report.theta3) == (0, 1, 0)
    assert report.theta == Fraction(20, 57)
    assert report.partition_energy_exponent == Fraction(3, 2)
    assert report.above_threshold


def test_threshold_itself_is_not_above():
    assert not exponent_report(4, Fraction(11, 12)).above_threshold


def test_exact_arithmetic_for_rational_inputs():
    report = exponent_report("9/2", "24/25")
    assert isinstance(report.s_threshold, Fraction)
    assert report.s_threshold == threshold_branches(Fraction(9, 2))[1]
    assert report.acl_decay_exponent == Fraction(1, 4)
    assert holder_identity_defects("9/2", "24/25") == (0, 0)
    assert holder_identity_defects("7/2", "24/25") == (0, 0)


def test_theta_components_sum_to_one_on_a_grid():
    worst_sum = worst_defect = 0.0
    for p in np.linspace(3.01, 4.99, 100):
        for s in np.linspace(0.5, 0.99, 100):
            thetas = theta_components(float(p), float(s))
            worst_sum = max(worst_sum, abs(sum(thetas) - 1.0))
            worst_defect = max(worst_defect, *(abs(d) for d in holder_identity_defects(float(p), float(s))))
    assert worst_sum <= 1e-12
    assert worst_defect <= 1e-12


def test_threshold_lies_between_critical_and_one():
    for p in ("31/10", "7/2", "4", "9/2", "49/10"):
        low, high = threshold_branches(p)
        threshold = low if as_number(p) <= 4 else high
        assert critical_regularity(p) < threshold < 1


@pytest.mark.parametrize("p", [3, 5, "11/2", 2.5])
def test_out_of_range_p(p):
    with pytest.raises(ExponentRangeError):
        exponent_report(p, "19/20")


def test_out_of_range_s():
    with pytest.raises(ExponentRangeError):
        exponent_report(4, 1)


def test_critical_regularity_needs_p_above_one():
    with pytest.raises(ExponentRangeError):
        critical_regularity(1)


def test_as_number():
    assert as_number("inf") == math.inf
    assert as_number("11/12") == Fraction(11, 12)
    assert isinstance(as_number(0.5), float)
    with pytest.raises(TypeError):
        as_number(True)


# ---------------------------------------------------------------------------
# Admissibility
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("q, r, m", [
    ("inf", 2, 0),
    (4, 4, Fraction(1, 2)),
    (Fraction(40, 19), 40, Fraction(19, 20)),
])
def test_admissible_pairs(q, r, m):
    ok, level = is_wave_admissible(q, r)
    assert ok
    assert level == m


@pytest.mark.parametrize("q, r", [(2, "inf"), (2, 2), (3, 3), ("inf", 1)])
def test_non_admissible_pairs(q, r):
    assert not is_wave_admissible(q, r)[0]


def test_level_is_reported_for_rejected_pairs():
    ok, m = is_wave_admissible(2, 2)
    assert not ok
    assert m == admissibility_level(2, 2) == Fraction(-1, 2)


def test_dual_pair():
    assert dual_pair(4, 4) == (Fraction(4, 3), Fraction(4, 3))
    assert dual_pair("inf", 2) == (1, 2)
    assert is_dual_inhomogeneous(Fraction(4, 3), Fraction(4, 3), 4, 4)
    assert not is_dual_inhomogeneous(1, 2, 4, 4)
