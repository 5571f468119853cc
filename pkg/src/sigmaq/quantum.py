"""Canonical behaviors: singlet correlations, Bell-EPR, PR box, product."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .behavior import Behavior, ContextTable, table_from_moments
from .errors import BiasOutOfRange
from .numeric import is_exact, parse_number
from .scenario import Scenario, bell_scenario, outcomes


@dataclass(frozen=True)
class AngleSetting:
    theta1: float   # degrees
    theta2: float

    def __post_init__(self):
        if not (math.isfinite(self.theta1) and math.isfinite(self.theta2)):
            raise ValueError("angles must be finite")


def singlet_correlation(setting: AngleSetting) -> float:
    """E(θ1, θ2) = sin(θ1 − θ2), angles in degrees; marginals are zero."""
    return math.sin(math.radians(setting.theta1 - setting.theta2))


def correlation_behavior(scenario: Scenario, correlations: Sequence) -> Behavior:
    """Zero-marginal behavior on pair contexts with the given correlations, in context order."""
    tables = []
    for k, corr in enumerate(correlations):
        names = scenario.context_names(k)
        zero = Fraction(0) if is_exact([parse_number(corr)]) else 0.0
        tables.append(table_from_moments(zero, zero, parse_number(corr), names))
    return Behavior(scenario, tuple(tables))


def bell_behavior() -> Behavior:
    """<AB> = <AB'> = <A'B> = 1/√2, <A'B'> = −1/√2, all means zero."""
    r = 1 / math.sqrt(2)
    return correlation_behavior(bell_scenario(), [r, r, r, -r])


def pr_box_scenario() -> Scenario:
    return Scenario.from_names(
        ["X", "Y", "Z", "W"], [["X", "Z"], ["X", "W"], ["Y", "Z"], ["Y", "W"]]
    )


def pr_box_behavior() -> Behavior:
    """<XZ> = 1, <XW> = <YZ> = <YW> = −1, zero means; exact rationals."""
    return correlation_behavior(pr_box_scenario(), [Fraction(1), Fraction(-1), Fraction(-1), Fraction(-1)])


def singlet_behavior(alice: tuple[float, float], bob: tuple[float, float]) -> Behavior:
    """Bell scenario behavior from two analyzer angles per side (degrees)."""
    a, a2 = alice
    b, b2 = bob
    corr = [
        singlet_correlation(AngleSetting(x, y)) for x, y in ((a, b), (a, b2), (a2, b), (a2, b2))
    ]
    return correlation_behavior(bell_scenario(), corr)


def product_behavior(biases: Sequence, scenario: Scenario | None = None) -> Behavior:
    """Independent ±1 variables with the given means, tabulated on every context.

    Integer and ``Fraction`` biases give exact tables.
    """
    scenario = scenario or bell_scenario()
    biases = [parse_number(b) for b in biases]
    if len(biases) != scenario.n:
        raise ValueError(f"need {scenario.n} biases, got {len(biases)}")
    for name, bias in zip(scenario.variables, biases):
        if not -1 <= bias <= 1:
            raise BiasOutOfRange(f"bias {float(bias)} for {name} outside [-1, 1]")
    if not is_exact(biases):
        biases = [float(b) for b in biases]
    half = Fraction(1, 2) if is_exact(biases) else 0.5
    tables = []
    for ctx in scenario.contexts:
        probs = []
        for o in outcomes(len(ctx)):
            p = 1
            for s, j in zip(o, ctx):
                p *= half * (1 + s * biases[j])
            probs.append(p)
        tables.append(ContextTable(tuple(scenario.variables[j] for j in ctx), tuple(probs)))
    return Behavior(scenario, tuple(tables))


def product_joint(biases: Sequence, n: int | None = None) -> list:
    """Explicit product distribution over atoms in canonical order."""
    biases = [parse_number(b) for b in biases]
    n = len(biases) if n is None else n
    exact = is_exact(biases)
    half = Fraction(1, 2) if exact else 0.5
    out = []
    for o in outcomes(n):
        p = 1
        for s, bias in zip(o, biases):
            p *= half * (1 + s * (bias if exact else float(bias)))
        out.append(p)
    return out
