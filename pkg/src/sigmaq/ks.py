"""Kochen-Specker sets: rays grouped into orthogonal bases.

Everything here is exact integer arithmetic.  A noncontextual valuation
gives each ray 0 or 1 with exactly one 1 in every basis; a KS set admits
none.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidKSSet, TooManyVectors
from .linalg import rank

MAX_SEARCH_VECTORS = 32


def canonical_ray(v: Sequence[int]) -> tuple[int, ...]:
    """Representative of ``±v`` whose first nonzero component is positive."""
    v = tuple(int(x) for x in v)
    first = next((x for x in v if x != 0), 0)
    if first == 0:
        raise InvalidKSSet("zero vector does not define a ray")
    return v if first > 0 else tuple(-x for x in v)


@dataclass(frozen=True)
class KSSet:
    """Integer vectors plus contexts given as index tuples into ``vectors``.

    Construction checks structure only (distinct rays, contexts of full
    dimension, valid indices); orthogonality is audited separately by
    :func:`verify_orthogonal_bases`.
    """

    vectors: tuple[tuple[int, ...], ...]
    contexts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        vecs = tuple(tuple(int(x) for x in v) for v in self.vectors)
        ctxs = tuple(tuple(int(i) for i in c) for c in self.contexts)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "contexts", ctxs)
        if not vecs:
            raise InvalidKSSet("no vectors")
        dims = {len(v) for v in vecs}
        if len(dims) != 1:
            raise InvalidKSSet(f"vectors of mixed dimension {sorted(dims)}")
        rays = [canonical_ray(v) for v in vecs]
        dup = [r for r, c in Counter(rays).items() if c > 1]
        if dup:
            raise InvalidKSSet(f"vectors repeated up to sign: {dup}")
        d = dims.pop()
        for c in ctxs:
            if len(c) != d:
                raise InvalidKSSet(f"context {c} has {len(c)} vectors, dimension is {d}")
            if len(set(c)) != len(c):
                raise InvalidKSSet(f"context {c} repeats a vector")
            if any(not 0 <= i < len(vecs) for i in c):
                raise InvalidKSSet(f"context {c} has an index out of range")

    @property
    def dimension(self) -> int:
        return len(self.vectors[0])

    def multiplicities(self) -> list[int]:
        counts = Counter(i for c in self.contexts for i in c)
        return [counts[i] for i in range(len(self.vectors))]


# Bases of the 18-ray, 9-context set in four dimensions
_CABELLO_BASES = [
    [(0, 0, 0, 1), (0, 0, 1, 0), (1, 1, 0, 0), (1, -1, 0, 0)],
    [(0, 0, 0, 1), (0, 1, 0, 0), (1, 0, 1, 0), (1, 0, -1, 0)],
    [(1, -1, 1, -1), (1, -1, -1, 1), (1, 1, 0, 0), (0, 0, 1, 1)],
    [(1, -1, 1, -1), (1, 1, 1, 1), (1, 0, -1, 0), (0, 1, 0, -1)],
    [(0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 0, -1)],
    [(1, -1, -1, 1), (1, 1, 1, 1), (1, 0, 0, -1), (0, 1, -1, 0)],
    [(1, 1, -1, 1), (1, 1, 1, -1), (1, -1, 0, 0), (0, 0, 1, 1)],
    [(1, 1, -1, 1), (-1, 1, 1, 1), (1, 0, 1, 0), (0, 1, 0, -1)],
    [(1, 1, 1, -1), (-1, 1, 1, 1), (1, 0, 0, 1), (0, 1, -1, 0)],
]


def ks_set_from_bases(bases: Sequence[Sequence[Sequence[int]]]) -> KSSet:
    """Build a KSSet from bases listed by vector, merging rays equal up to sign."""
    index = {}
    vectors = []
    contexts = []
    for basis in bases:
        ctx = []
        for v in basis:
            ray = canonical_ray(v)
            if ray not in index:
                index[ray] = len(vectors)
                vectors.append(ray)
            ctx.append(index[ray])
        contexts.append(tuple(ctx))
    return KSSet(tuple(vectors), tuple(contexts))


def cabello_set() -> KSSet:
    return ks_set_from_bases(_CABELLO_BASES)


@dataclass(frozen=True)
class ContextAudit:
    context: tuple[int, ...]
    nonzero_dots: tuple[tuple[int, int, int], ...]   # (i, j, <v_i, v_j>)
    independent: bool

    @property
    def ok(self) -> bool:
        return not self.nonzero_dots and self.independent


@dataclass(frozen=True)
class OrthogonalityReport:
    audits: tuple[ContextAudit, ...]

    @property
    def ok(self) -> bool:
        return all(a.ok for a in self.audits)

    def failures(self) -> list[ContextAudit]:
        return [a for a in self.audits if not a.ok]


def _dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


def verify_orthogonal_bases(ks: KSSet) -> OrthogonalityReport:
    """Check every context is pairwise orthogonal and spans the space."""
    audits = []
    for ctx in ks.contexts:
        vecs = [ks.vectors[i] for i in ctx]
        bad = tuple(
            (ctx[a], ctx[b], d)
            for a, b in itertools.combinations(range(len(ctx)), 2)
            if (d := _dot(vecs[a], vecs[b])) != 0
        )
        audits.append(ContextAudit(ctx, bad, rank(vecs) == len(vecs)))
    return OrthogonalityReport(tuple(audits))


def parity_obstruction(ks: KSSet) -> bool:
    """Every ray used an even number of times but an odd number of contexts.

    Summing "exactly one 1 per context" over all contexts then counts each
    ray's value an even number of times, yet must total the odd context
    count, so no valuation can exist.
    """
    return len(ks.contexts) % 2 == 1 and all(m % 2 == 0 for m in ks.multiplicities())


def is_valid_valuation(ks: KSSet, valuation: Sequence[int]) -> bool:
    return len(valuation) == len(ks.vectors) and all(
        sum(valuation[i] for i in c) == 1 for c in ks.contexts
    )


def search_noncontextual_valuation(ks: KSSet) -> tuple[int, ...] | None:
    """Depth-first search for a 0/1 valuation with exactly one 1 per context.

    Branches on the open context with the fewest live candidates and
    propagates each choice (every other ray sharing a context with the
    chosen one is forced to 0).  Rays in no context are set to 0.  The
    search is complete; ``None`` means no valuation exists.
    """
    nvec = len(ks.vectors)
    if nvec > MAX_SEARCH_VECTORS:
        raise TooManyVectors(f"{nvec} vectors exceeds the search bound of {MAX_SEARCH_VECTORS}")
    contexts = ks.contexts
    neighbours = [set() for _ in range(nvec)]
    for c in contexts:
        for i in c:
            neighbours[i].update(j for j in c if j != i)

    def assign(values, i):
        # set ray i to 1 and its neighbours to 0; None on conflict
        if values[i] == 0:
            return None
        values = list(values)
        values[i] = 1
        for j in neighbours[i]:
            if values[j] == 1:
                return None
            values[j] = 0
        return values

    def solve(values):
        best = None
        for c in contexts:
            if any(values[i] == 1 for i in c):
                continue
            live = [i for i in c if values[i] is None]
            if not live:
                return None
            if best is None or len(live) < len(best):
                best = live
        if best is None:
            return values
        for i in best:
            nxt = assign(values, i)
            if nxt is not None:
                found = solve(nxt)
                if found is not None:
                    return found
        return None

    result = solve([None] * nvec)
    if result is None:
        return None
    return tuple(0 if v is None else v for v in result)
