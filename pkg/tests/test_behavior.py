import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sigmaq.behavior import (
    Behavior,
    ContextTable,
    check_no_signaling,
    chsh_roles,
    chsh_values,
    moments_from_table,
    table_from_moment_map,
    table_from_moments,
)
from sigmaq.errors import InfeasibleMoments, InvalidTable, WrongScenarioShape
from sigmaq.quantum import bell_behavior, correlation_behavior, pr_box_behavior, product_behavior
from sigmaq.sampling import random_local_behavior
from sigmaq.scenario import Scenario, bell_scenario, cyclic_triangle

unit = st.floats(-1, 1, allow_nan=False)


def test_table_validation():
    with pytest.raises(InvalidTable):
        ContextTable(("X", "Y"), (0.5, 0.5, 0.0))
    with pytest.raises(InvalidTable):
        ContextTable(("X",), (1.1, -0.1))
    with pytest.raises(InvalidTable):
        ContextTable(("X",), (0.5, 0.6))


def test_from_mapping_requires_every_outcome():
    with pytest.raises(InvalidTable):
        ContextTable.from_mapping(("X", "Y"), {"++": 1.0})
    with pytest.raises(InvalidTable):
        ContextTable.from_mapping(("X",), {"+": 0.5, "-": 0.5, "+-": 0})


def test_exact_table_from_strings():
    t = ContextTable.from_mapping(("X",), {"+": "1/3", "-": "2/3"})
    assert t.exact and t.p("-") == Fraction(2, 3)


@given(unit, unit, st.data())
def test_moment_round_trip(mx, my, data):
    lo = max(-1.0, abs(mx + my) - 1)
    hi = min(1.0, 1 - abs(mx - my))
    mxy = data.draw(st.floats(lo, hi, allow_nan=False))
    t = table_from_moments(mx, my, mxy)
    m = moments_from_table(t)
    assert m[("X",)] == pytest.approx(mx, abs=1e-12)
    assert m[("Y",)] == pytest.approx(my, abs=1e-12)
    assert m[("X", "Y")] == pytest.approx(mxy, abs=1e-12)


def test_three_variable_moment_inversion_exact():
    moments = {("X",): Fraction(1, 5), ("Y",): 0, ("Z",): 0,
               ("X", "Y"): 0, ("X", "Z"): 0, ("Y", "Z"): Fraction(1, 2), ("X", "Y", "Z"): 0}
    t = table_from_moment_map("XYZ", moments)
    assert t.exact
    assert moments_from_table(t)[("Y", "Z")] == Fraction(1, 2)


def test_infeasible_moments():
    with pytest.raises(InfeasibleMoments):
        table_from_moments(1, -1, 1)


def test_behavior_requires_matching_tables():
    t = table_from_moments(0, 0, 0, ("A", "B"))
    with pytest.raises(InvalidTable):
        Behavior(bell_scenario(), (t,))


def test_bell_behavior_moments():
    b = bell_behavior()
    r = 1 / math.sqrt(2)
    assert b.moment(["A", "B"]) == pytest.approx(r)
    assert b.moment(["A'", "B'"]) == pytest.approx(-r)
    assert b.moment(["A"]) == pytest.approx(0)


def test_no_signaling_passes_on_local_behaviors(rng):
    for _ in range(20):
        assert check_no_signaling(random_local_behavior(rng)).passed


def test_signaling_discrepancy_is_reported():
    b = bell_behavior()
    t = b.tables[0]
    probs = list(t.probs)
    probs[0] += 0.05
    probs[1] -= 0.05   # shifts P(B = +) within context (A, B)
    bad = Behavior(b.scenario, (ContextTable(t.variables, tuple(probs)),) + b.tables[1:])
    rep = check_no_signaling(bad)
    assert not rep.passed
    assert rep.max_discrepancy == pytest.approx(0.05, abs=1e-12)
    flagged = {e.variables for e in rep.entries if e.discrepancy > 1e-9}
    assert flagged == {("B",)}


def test_no_signaling_on_triangle_uses_single_variables():
    b = correlation_behavior(cyclic_triangle(), [0.2, -0.3, 0.1])
    rep = check_no_signaling(b)
    assert rep.passed
    assert sorted(e.variables for e in rep.entries) == [("X",), ("Y",), ("Z",)]


def test_chsh_roles_follow_cycle():
    assert chsh_roles(bell_scenario()) == ("A", "A'", "B", "B'")
    with pytest.raises(WrongScenarioShape):
        chsh_roles(cyclic_triangle())
    star = Scenario.from_names("ABCD", [["A", "B"], ["A", "C"], ["A", "D"], ["B", "C"]])
    with pytest.raises(WrongScenarioShape):
        chsh_roles(star)


def test_chsh_has_eight_variants_in_sign_pairs():
    rep = chsh_values(bell_behavior())
    vals = rep.values
    assert len(vals) == 8
    for k in range(0, 8, 2):
        assert vals[k] == -vals[k + 1]
    assert rep.max_abs == pytest.approx(2 * math.sqrt(2), abs=1e-12)


def test_chsh_of_pr_box_and_product():
    assert chsh_values(pr_box_behavior()).max_abs == 4
    assert chsh_values(product_behavior([0, 0, 0, 0])).max_abs == 0


@given(st.lists(unit, min_size=4, max_size=4))
def test_chsh_bound_on_product_behaviors(biases):
    # product behaviors are local, so every variant stays within 2
    rep = chsh_values(product_behavior(biases))
    assert rep.max_abs <= 2 + 1e-12


def test_chsh_expression_labels():
    rep = chsh_values(bell_behavior())
    labels = [k for k, _ in rep.variants]
    assert labels[0] == "-<A B>+<A B'>+<A' B>+<A' B'>"
    assert labels[1].startswith("-(")
    assert "<A' B'>" in rep.correlations


def test_table_marginal_exact():
    t = ContextTable(("X", "Y"), (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 8)))
    assert t.marginal(["Y"]) == (Fraction(5, 8), Fraction(3, 8))
    assert np.isclose(float(sum(t.marginal(["X"]))), 1)
