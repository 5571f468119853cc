"""Per-context statistics: tables, moments, no-signaling and CHSH."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InfeasibleMoments, InvalidTable, WrongScenarioShape
from .numeric import Number, is_exact, parse_number, tolerances, unify
from .scenario import Scenario, key_to_signs, outcomes, signs_to_key


def _prod(signs):
    out = 1
    for s in signs:
        out *= s
    return out


@dataclass(frozen=True)
class ContextTable:
    """Probabilities of every joint outcome of ``variables``.

    ``probs[k]`` belongs to ``outcomes(len(variables))[k]`` (``+`` first).
    """

    variables: tuple[str, ...]
    probs: tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "probs", tuple(unify(self.probs)))
        if len(self.probs) != 1 << len(self.variables):
            raise InvalidTable(
                f"context {self.variables} needs {1 << len(self.variables)} entries, got {len(self.probs)}"
            )
        eps = tolerances().norm
        if any(p < -eps for p in self.probs):
            raise InvalidTable(f"negative probability in table for {self.variables}")
        total = sum(self.probs)
        if abs(total - 1) > eps:
            raise InvalidTable(f"table for {self.variables} sums to {float(total)!r}")

    @classmethod
    def unchecked(cls, variables, probs) -> "ContextTable":
        """Build without the nonnegativity/normalization checks (signed marginals)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "variables", tuple(variables))
        object.__setattr__(obj, "probs", tuple(unify(probs)))
        return obj

    @classmethod
    def from_mapping(cls, variables: Sequence[str], p: Mapping[str, object]) -> "ContextTable":
        size = len(variables)
        probs = {}
        for key, value in p.items():
            signs = key_to_signs(key)
            if len(signs) != size:
                raise InvalidTable(f"outcome key {key!r} does not match context {tuple(variables)}")
            if signs in probs:
                raise InvalidTable(f"duplicate outcome key {key!r}")
            probs[signs] = parse_number(value)
        missing = [signs_to_key(o) for o in outcomes(size) if o not in probs]
        if missing:
            raise InvalidTable(f"missing outcomes {missing} for context {tuple(variables)}")
        return cls(variables, tuple(probs[o] for o in outcomes(size)))

    @property
    def exact(self) -> bool:
        return is_exact(self.probs)

    def p(self, key: str) -> Number:
        return self.probs[outcomes(len(self.variables)).index(key_to_signs(key))]

    def as_dict(self) -> dict[str, Number]:
        return {signs_to_key(o): v for o, v in zip(outcomes(len(self.variables)), self.probs)}

    def marginal(self, subset: Sequence[str]) -> tuple[Number, ...]:
        """Marginal distribution over ``subset`` (canonical order of that subset)."""
        pos = [self.variables.index(v) for v in subset]
        sub = outcomes(len(pos))
        acc = [0 * self.probs[0]] * len(sub)
        for o, p in zip(outcomes(len(self.variables)), self.probs):
            acc[sub.index(tuple(o[i] for i in pos))] += p
        return tuple(acc)


def moments_from_table(table: ContextTable) -> dict[tuple[str, ...], Number]:
    """Every product moment of the table's variables, keyed by variable tuple.

    Keys follow the context order and run over all non-empty subsets, so a
    pair context yields ``<X>``, ``<Y>`` and ``<XY>``.
    """
    names = table.variables
    outs = outcomes(len(names))
    result = {}
    for r in range(1, len(names) + 1):
        for pos in itertools.combinations(range(len(names)), r):
            result[tuple(names[i] for i in pos)] = sum(
                _prod(o[i] for i in pos) * p for o, p in zip(outs, table.probs)
            )
    return result


def table_from_moment_map(
    variables: Sequence[str], moments: Mapping[tuple[str, ...], object], eps: float | None = None
) -> ContextTable:
    """Invert :func:`moments_from_table`: p(o) = 2^-m * sum_S m_S * prod_{i in S} o_i."""
    variables = tuple(variables)
    m = len(variables)
    eps = tolerances().norm if eps is None else eps
    subsets = [()]
    vals = [Fraction(1)]
    for r in range(1, m + 1):
        for pos in itertools.combinations(range(m), r):
            key = tuple(variables[i] for i in pos)
            if key not in moments:
                raise KeyError(f"missing moment {key}")
            subsets.append(pos)
            vals.append(moments[key])
    vals = unify(vals)
    scale = Fraction(1, 1 << m) if is_exact(vals) else 1.0 / (1 << m)
    probs = []
    for o in outcomes(m):
        probs.append(scale * sum(v * _prod(o[i] for i in pos) for pos, v in zip(subsets, vals)))
    bad = [(signs_to_key(o), p) for o, p in zip(outcomes(m), probs) if p < -eps]
    if bad:
        raise InfeasibleMoments(f"moments give negative entries {bad} for {variables}")
    # clip rounding noise below zero
    probs = [p if p >= 0 else 0 * p for p in probs]
    return ContextTable(variables, tuple(probs))


def table_from_moments(mean_x, mean_y, mean_xy, variables: Sequence[str] = ("X", "Y"), eps=None) -> ContextTable:
    """Two-variable table from its first moments and correlation."""
    x, y = variables
    return table_from_moment_map(variables, {(x,): mean_x, (y,): mean_y, (x, y): mean_xy}, eps)


@dataclass(frozen=True)
class Behavior:
    """One context table per declared context, aligned with ``scenario.contexts``."""

    scenario: Scenario
    tables: tuple[ContextTable, ...]

    def __post_init__(self):
        tables = tuple(self.tables)
        if len(tables) != len(self.scenario.contexts):
            raise InvalidTable(
                f"{len(self.scenario.contexts)} contexts but {len(tables)} tables"
            )
        for k, t in enumerate(tables):
            if t.variables != self.scenario.context_names(k):
                raise InvalidTable(
                    f"table {k} is for {t.variables}, expected {self.scenario.context_names(k)}"
                )
        if not all(t.exact for t in tables):
            tables = tuple(
                t if not t.exact else ContextTable(t.variables, tuple(float(p) for p in t.probs))
                for t in tables
            )
        object.__setattr__(self, "tables", tables)

    @classmethod
    def from_tables(cls, scenario: Scenario, tables: Mapping[tuple[str, ...], object]) -> "Behavior":
        """``tables`` maps context name tuples to a probs sequence or an outcome-key mapping."""
        out = []
        for k in range(len(scenario.contexts)):
            names = scenario.context_names(k)
            entry = tables[names]
            if isinstance(entry, Mapping):
                out.append(ContextTable.from_mapping(names, entry))
            else:
                out.append(ContextTable(names, tuple(entry)))
        return cls(scenario, tuple(out))

    @property
    def exact(self) -> bool:
        return all(t.exact for t in self.tables)

    def table(self, context: Sequence[str]) -> ContextTable:
        return self.tables[self.scenario.find_context(context)]

    def moment(self, variables: Sequence[str]) -> Number:
        """Product moment of ``variables`` read from the first context containing them all."""
        wanted = set(variables)
        for t in self.tables:
            if wanted <= set(t.variables):
                key = tuple(v for v in t.variables if v in wanted)
                return moments_from_table(t)[key]
        raise WrongScenarioShape(f"no context contains {tuple(variables)}")


@dataclass(frozen=True)
class SignalingEntry:
    variables: tuple[str, ...]
    contexts: tuple[int, int]
    marginal_a: tuple[Number, ...]
    marginal_b: tuple[Number, ...]
    discrepancy: float


@dataclass(frozen=True)
class NoSignalingReport:
    entries: tuple[SignalingEntry, ...]
    tolerance: float

    @property
    def max_discrepancy(self) -> float:
        return max((e.discrepancy for e in self.entries), default=0.0)

    @property
    def passed(self) -> bool:
        return all(e.discrepancy <= self.tolerance for e in self.entries)

    def to_dict(self, scenario: Scenario | None = None) -> dict:
        def ctx(k):
            return list(scenario.context_names(k)) if scenario is not None else k

        return {
            "passed": self.passed,
            "max_discrepancy": self.max_discrepancy,
            "tolerance": self.tolerance,
            "entries": [
                {
                    "variables": list(e.variables),
                    "contexts": [ctx(e.contexts[0]), ctx(e.contexts[1])],
                    "marginals": [[float(x) for x in e.marginal_a], [float(x) for x in e.marginal_b]],
                    "discrepancy": e.discrepancy,
                }
                for e in self.entries
            ],
        }


def check_no_signaling(behavior: Behavior, eps: float | None = None) -> NoSignalingReport:
    """Compare marginals on the shared variables of every pair of overlapping contexts.

    For pair contexts the overlap is a single variable, so this is the usual
    per-variable test; larger contexts are compared on their whole overlap.
    """
    eps = tolerances().ns if eps is None else eps
    scenario = behavior.scenario
    entries = []
    ctxs = scenario.contexts
    for i, j in itertools.combinations(range(len(ctxs)), 2):
        shared = [v for v in ctxs[i] if v in ctxs[j]]
        if not shared:
            continue
        names = tuple(scenario.variables[v] for v in shared)
        ma = behavior.tables[i].marginal(names)
        mb = behavior.tables[j].marginal(names)
        disc = float(max(abs(a - b) for a, b in zip(ma, mb)))
        entries.append(SignalingEntry(names, (i, j), ma, mb, disc))
    return NoSignalingReport(tuple(entries), eps)


@dataclass(frozen=True)
class CHSHReport:
    roles: tuple[str, str, str, str]   # X, Y on one side; Z, W on the other
    correlations: dict[str, float]
    variants: tuple[tuple[str, float], ...]

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.variants)

    @property
    def max_abs(self) -> float:
        return max(abs(v) for v in self.values)

    def to_dict(self) -> dict:
        return {
            "roles": list(self.roles),
            "correlations": dict(self.correlations),
            "variants": [{"expression": k, "value": v} for k, v in self.variants],
            "max_abs": self.max_abs,
        }


def chsh_roles(scenario: Scenario) -> tuple[str, str, str, str]:
    """Infer (X, Y, Z, W) for a four-cycle X-Z, X-W, Y-Z, Y-W of pair contexts."""
    ctxs = scenario.contexts
    if scenario.n != 4 or len(ctxs) != 4 or any(len(c) != 2 for c in ctxs):
        raise WrongScenarioShape("CHSH needs 4 variables and 4 pair contexts")
    edges = {frozenset(c) for c in ctxs}
    if len(edges) != 4:
        raise WrongScenarioShape("repeated context")
    nbrs = {v: set() for v in range(4)}
    for a, b in ctxs:
        nbrs[a].add(b)
        nbrs[b].add(a)
    if any(len(s) != 2 for s in nbrs.values()):
        raise WrongScenarioShape("context structure is not a 4-cycle")
    x, z = ctxs[0]
    (w,) = nbrs[x] - {z}
    (y,) = nbrs[z] - {x}
    if frozenset((y, w)) not in edges or len({x, y, z, w}) != 4:
        raise WrongScenarioShape("context structure is not a 4-cycle")
    names = scenario.variables
    return names[x], names[y], names[z], names[w]


def chsh_values(behavior: Behavior) -> CHSHReport:
    """All eight CHSH sign placements: ±(E_XZ + E_XW + E_YZ + E_YW - 2 E_k)."""
    x, y, z, w = chsh_roles(behavior.scenario)
    pairs = [(x, z), (x, w), (y, z), (y, w)]
    corr = [float(behavior.moment(p)) for p in pairs]
    labels = [f"<{a} {b}>" for a, b in pairs]
    variants = []
    for k in range(4):
        terms = "".join(("-" if i == k else "+") + labels[i] for i in range(4)).lstrip("+")
        value = sum(corr) - 2 * corr[k]
        variants.append((terms, value))
        variants.append((f"-({terms})", -value))
    return CHSHReport((x, y, z, w), dict(zip(labels, corr)), tuple(variants))
