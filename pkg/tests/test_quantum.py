import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sigmaq.behavior import chsh_values
from sigmaq.errors import BiasOutOfRange
from sigmaq.quantum import (
    AngleSetting,
    bell_behavior,
    pr_box_behavior,
    product_behavior,
    product_joint,
    singlet_behavior,
    singlet_correlation,
)

TSIRELSON = 2 * math.sqrt(2)
angle = st.floats(-720, 720, allow_nan=False)


def test_singlet_correlation_values():
    assert singlet_correlation(AngleSetting(90, 0)) == pytest.approx(1)
    assert singlet_correlation(AngleSetting(0, 0)) == 0
    assert singlet_correlation(AngleSetting(0, 30)) == pytest.approx(-0.5)


def test_angles_must_be_finite():
    with pytest.raises(ValueError):
        AngleSetting(float("nan"), 0)


@given(angle, angle, angle, angle)
def test_tsirelson_bound(a, a2, b, b2):
    rep = chsh_values(singlet_behavior((a, a2), (b, b2)))
    assert rep.max_abs <= TSIRELSON + 1e-9


def test_quoted_angles_under_sine_convention():
    # the quoted analyzer angles do not reach the bound with E = sin(difference)
    rep = chsh_values(singlet_behavior((0, 45), (22.5, 67.5)))
    assert rep.max_abs == pytest.approx(2.0719, abs=1e-4)
    assert rep.max_abs < TSIRELSON - 0.5


def test_some_angles_reach_the_bound():
    # sin(a - b) = cos(a - b - 90): shift the usual optimal settings by 90 degrees
    rep = chsh_values(singlet_behavior((0, 90), (-45, 45)))
    assert rep.max_abs == pytest.approx(TSIRELSON, abs=1e-12)


def test_bell_behavior_is_at_tsirelson():
    assert chsh_values(bell_behavior()).max_abs == pytest.approx(TSIRELSON, abs=1e-12)


def test_pr_box_is_exact():
    b = pr_box_behavior()
    assert b.exact
    assert b.moment(["X", "Z"]) == 1 and b.moment(["Y", "W"]) == -1


def test_product_behavior_checks_bias_range():
    with pytest.raises(BiasOutOfRange):
        product_behavior([0, 0, 1.5, 0])
    with pytest.raises(ValueError):
        product_behavior([0, 0])


def test_product_joint_sums_to_one_and_factorizes():
    biases = [Fraction(1, 2), Fraction(-1, 3), 0, 1]
    p = product_joint(biases)
    assert sum(p) == 1
    # atom "++++" is the product of (1 + m)/2
    assert p[0] == Fraction(3, 4) * Fraction(1, 3) * Fraction(1, 2) * 1


def test_product_behavior_exactness_follows_input():
    assert product_behavior([0, Fraction(1, 2), 0, 0]).exact
    assert not product_behavior([0.1, 0, 0, 0]).exact


def test_random_angles_never_exceed_bound():
    rng = np.random.default_rng(5)
    for a, a2, b, b2 in rng.uniform(0, 360, size=(200, 4)):
        assert chsh_values(singlet_behavior((a, a2), (b, b2))).max_abs <= TSIRELSON + 1e-9
