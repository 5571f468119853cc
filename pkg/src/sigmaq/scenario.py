"""Measurement scenarios, the global atom space and its events.

Atoms are full sign assignments to every variable.  They are ordered
lexicographically over the variables in declaration order with ``+1``
before ``-1``, so atom ``k`` has variable ``j`` equal to ``-1`` exactly
when bit ``n-1-j`` of ``k`` is set.  Atom 0 is all-plus.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidScenario, NotAContext, ScenarioTooLarge, UnknownVariable

MAX_VARIABLES = 24


@dataclass(frozen=True)
class Scenario:
    """Named dichotomous variables plus the declared measurement contexts.

    ``contexts`` holds tuples of variable indices; use :meth:`from_names`
    to build from names.
    """

    variables: tuple[str, ...]
    contexts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "contexts", tuple(tuple(int(i) for i in c) for c in self.contexts))
        names = self.variables
        if any(not isinstance(v, str) or not v for v in names):
            raise InvalidScenario("variable names must be non-empty strings")
        if len(set(names)) != len(names):
            raise InvalidScenario("variable names must be unique")
        n = len(names)
        seen = set()
        for ctx in self.contexts:
            if not ctx:
                raise InvalidScenario("empty context")
            if len(set(ctx)) != len(ctx):
                raise InvalidScenario(f"duplicate variable in context {ctx}")
            for i in ctx:
                if not 0 <= i < n:
                    raise InvalidScenario(f"context index {i} out of range")
            seen.update(ctx)
        missing = [names[i] for i in range(n) if i not in seen]
        if missing:
            raise InvalidScenario(f"variables in no context: {missing}")

    @classmethod
    def from_names(cls, variables: Sequence[str], contexts: Iterable[Sequence[str]]) -> "Scenario":
        variables = tuple(variables)
        lookup = {v: i for i, v in enumerate(variables)}
        resolved = []
        for ctx in contexts:
            try:
                resolved.append(tuple(lookup[v] for v in ctx))
            except KeyError as exc:
                raise InvalidScenario(f"context refers to unknown variable {exc.args[0]!r}") from None
        return cls(variables, tuple(resolved))

    @property
    def n(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def resolve(self, variables: Sequence[str | int]) -> tuple[int, ...]:
        """Map names (or already-resolved indices) to variable indices."""
        out = []
        for v in variables:
            if isinstance(v, str):
                out.append(self.index(v))
            else:
                v = int(v)
                if not 0 <= v < self.n:
                    raise UnknownVariable(f"variable index {v} out of range")
                out.append(v)
        return tuple(out)

    def context_names(self, k: int) -> tuple[str, ...]:
        return tuple(self.variables[i] for i in self.contexts[k])

    def find_context(self, variables: Sequence[str | int]) -> int:
        """Position of the declared context with exactly these variables, in this order."""
        idx = self.resolve(variables)
        try:
            return self.contexts.index(idx)
        except ValueError:
            raise NotAContext(
                f"{[self.variables[i] for i in idx]} is not a declared context"
            ) from None


class Event:
    """A set of atom indices, kept sorted."""

    __slots__ = ("_indices",)

    def __init__(self, indices):
        arr = np.unique(np.asarray(indices, dtype=np.int64))
        arr.setflags(write=False)
        self._indices = arr

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    def __len__(self):
        return len(self._indices)

    def __iter__(self):
        return iter(self._indices.tolist())

    def __contains__(self, k):
        i = np.searchsorted(self._indices, k)
        return bool(i < len(self._indices) and self._indices[i] == k)

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return np.array_equal(self._indices, other._indices)

    def __hash__(self):
        return hash(self._indices.tobytes())

    def __and__(self, other: "Event") -> "Event":
        return Event(np.intersect1d(self._indices, other._indices, assume_unique=True))

    def __or__(self, other: "Event") -> "Event":
        return Event(np.union1d(self._indices, other._indices))

    def __repr__(self):
        return f"Event({self._indices.tolist()})"


@dataclass(frozen=True, eq=False)
class AtomSpace:
    scenario: Scenario
    size: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 << self.scenario.n)

    def __len__(self):
        return self.size

    @cached_property
    def signs(self) -> np.ndarray:
        """``(2**n, n)`` int8 matrix of atom signs in canonical order."""
        n = self.scenario.n
        k = np.arange(self.size, dtype=np.int64)[:, None]
        shifts = np.arange(n - 1, -1, -1, dtype=np.int64)[None, :]
        bits = (k >> shifts) & 1
        out = (1 - 2 * bits).astype(np.int8)
        out.setflags(write=False)
        return out

    def atom(self, k: int) -> tuple[int, ...]:
        n = self.scenario.n
        if not 0 <= k < self.size:
            raise IndexError(k)
        return tuple(-1 if (k >> (n - 1 - j)) & 1 else 1 for j in range(n))

    def __getitem__(self, k: int) -> tuple[int, ...]:
        return self.atom(k)

    def __iter__(self):
        return (self.atom(k) for k in range(self.size))

    def index_of(self, signs: Sequence[int]) -> int:
        n = self.scenario.n
        if len(signs) != n:
            raise ValueError(f"atom needs {n} signs, got {len(signs)}")
        k = 0
        for s in signs:
            if s not in (1, -1):
                raise ValueError(f"atom signs must be +1/-1, got {s}")
            k = (k << 1) | (s == -1)
        return k

    def label(self, k: int) -> str:
        return signs_to_key(self.atom(k))

    @property
    def labels(self) -> list[str]:
        return [self.label(k) for k in range(self.size)]


def build_atom_space(scenario: Scenario) -> AtomSpace:
    if scenario.n > MAX_VARIABLES:
        raise ScenarioTooLarge(
            f"{scenario.n} variables would need 2**{scenario.n} atoms (limit {MAX_VARIABLES})"
        )
    return AtomSpace(scenario)


def event_for_assignment(space: AtomSpace, assignment: Mapping[str | int, int]) -> Event:
    """Atoms consistent with every assigned sign; ``2**(n-k)`` of them."""
    scenario = space.scenario
    n = scenario.n
    k = np.arange(space.size, dtype=np.int64)
    keep = np.ones(space.size, dtype=bool)
    for var, sign in assignment.items():
        j = scenario.resolve([var])[0]
        if sign not in (1, -1):
            raise ValueError(f"outcome for {scenario.variables[j]} must be +1 or -1, got {sign}")
        bit = (k >> (n - 1 - j)) & 1
        keep &= bit == (1 if sign == -1 else 0)
    return Event(np.flatnonzero(keep))


def product_event(space: AtomSpace, context: Sequence[str | int], outcome: Sequence[int]) -> Event:
    """Event of one joint outcome of a declared context."""
    scenario = space.scenario
    idx = scenario.resolve(context)
    scenario.find_context(idx)
    if len(outcome) != len(idx):
        raise ValueError("outcome length does not match context")
    return event_for_assignment(space, dict(zip(idx, outcome)))


def outcomes(size: int) -> list[tuple[int, ...]]:
    """Joint outcomes of ``size`` variables in canonical (+ first) order."""
    return [
        tuple(-1 if (k >> (size - 1 - j)) & 1 else 1 for j in range(size))
        for k in range(1 << size)
    ]


def signs_to_key(signs: Sequence[int]) -> str:
    return "".join("+" if s == 1 else "-" for s in signs)


def key_to_signs(key: str) -> tuple[int, ...]:
    out = []
    for ch in key:
        if ch == "+":
            out.append(1)
        elif ch in "-−":
            out.append(-1)
        else:
            raise ValueError(f"bad outcome key {key!r}")
    return tuple(out)


def bell_scenario() -> Scenario:
    """A, A' on one side, B, B' on the other, four cross contexts."""
    return Scenario.from_names(
        ["A", "A'", "B", "B'"],
        [["A", "B"], ["A", "B'"], ["A'", "B"], ["A'", "B'"]],
    )


def cyclic_triangle() -> Scenario:
    return Scenario.from_names(["X", "Y", "Z"], [["X", "Y"], ["X", "Z"], ["Y", "Z"]])
