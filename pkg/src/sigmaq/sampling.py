"""Random behaviors for property checks and the ``selftest`` command."""
from __future__ import annotations

import numpy as np

from .behavior import Behavior, ContextTable
from .quantum import correlation_behavior
from .scenario import Scenario, bell_scenario, build_atom_space


def behavior_from_joint(scenario: Scenario, weights) -> Behavior:
    """Context tables obtained by summing a (nonnegative) joint over atoms."""
    space = build_atom_space(scenario)
    weights = np.asarray(weights, dtype=float)
    tables = []
    for ctx in scenario.contexts:
        bits = (space.signs[:, list(ctx)] < 0).astype(np.int64)
        g = bits @ (1 << np.arange(len(ctx) - 1, -1, -1))
        probs = np.bincount(g, weights=weights, minlength=1 << len(ctx))
        tables.append(ContextTable(tuple(scenario.variables[j] for j in ctx), tuple(probs.tolist())))
    return Behavior(scenario, tuple(tables))


def random_local_behavior(rng: np.random.Generator, scenario: Scenario | None = None) -> Behavior:
    scenario = scenario or bell_scenario()
    w = rng.dirichlet(np.ones(1 << scenario.n))
    return behavior_from_joint(scenario, w)


def pr_box_correlations(k: int) -> list[float]:
    """The eight PR boxes of the Bell scenario: ±(1,1,1,1) with entry k%4 negated."""
    corr = [1.0, 1.0, 1.0, 1.0]
    corr[k % 4] = -1.0
    sign = 1.0 if k < 4 else -1.0
    return [sign * c for c in corr]


def mix(a: Behavior, b: Behavior, weight: float) -> Behavior:
    """``(1 - weight) * a + weight * b`` table by table."""
    tables = []
    for ta, tb in zip(a.tables, b.tables):
        probs = [(1 - weight) * float(x) + weight * float(y) for x, y in zip(ta.probs, tb.probs)]
        tables.append(ContextTable(ta.variables, tuple(probs)))
    return Behavior(a.scenario, tuple(tables))


def random_ns_behavior(rng: np.random.Generator) -> Behavior:
    """Local behavior mixed with a random PR box; may or may not be contextual."""
    local = random_local_behavior(rng)
    pr = correlation_behavior(bell_scenario(), pr_box_correlations(int(rng.integers(8))))
    return mix(local, pr, float(rng.uniform(0, 1)))


def random_contextual_correlations(rng: np.random.Generator, margin: float = 0.05) -> np.ndarray:
    """Zero-marginal correlations whose largest CHSH variant exceeds ``2 + margin``."""
    while True:
        e = rng.uniform(-1, 1, 4)
        variants = [abs(e.sum() - 2 * e[k]) for k in range(4)]
        if max(variants) > 2 + margin:
            return e


def random_product_biases(rng: np.random.Generator, n: int = 4) -> np.ndarray:
    return rng.uniform(-1, 1, n)

