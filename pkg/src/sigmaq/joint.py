"""Signed joint distributions reproducing a behavior.

The observable statistics pin down atom weights only through a linear
system ``A p = b``: one normalization row plus one row per product moment
that some context can see.  This module assembles that system, describes
its full affine solution set, and finds the member of least total mass
``sum |p|`` by linear programming.  ``delta = mass - 1`` is zero exactly
when a genuine (nonnegative) joint exists.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .behavior import Behavior, ContextTable, check_no_signaling, moments_from_table
from .errors import InconsistentSystem, NegativeMarginal, NotAContext, SignalingDetected
from .linalg import nullspace, rref
from .numeric import Number, is_exact, tolerances
from .scenario import AtomSpace, Scenario, build_atom_space, outcomes
from .simplex import linprog_bland

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """``A p = b`` over the atoms of ``space``.

    ``subsets[r]`` is the sorted tuple of variable indices whose product
    row ``r`` measures; the normalization row has the empty subset.
    """

    space: AtomSpace
    A: np.ndarray
    b: tuple[Number, ...]
    labels: tuple[str, ...]
    subsets: tuple[tuple[int, ...], ...]

    @property
    def scenario(self) -> Scenario:
        return self.space.scenario

    @property
    def exact(self) -> bool:
        return is_exact(self.b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def b_array(self) -> np.ndarray:
        if self.exact:
            return np.array(self.b, dtype=object)
        return np.array(self.b, dtype=float)

    def residual(self, p) -> float:
        """``max |A p - b|`` as a float."""
        p = np.asarray(p)
        if self.exact and p.dtype == object:
            r = self.A.astype(object) @ p - self.b_array()
        else:
            r = self.A @ p.astype(float) - self.b_array().astype(float)
        return float(max(abs(x) for x in r))

    @cached_property
    def _rref(self):
        return rref(self.A.tolist())


def _row(space: AtomSpace, subset: Sequence[int]) -> np.ndarray:
    if not subset:
        return np.ones(space.size, dtype=np.int64)
    return space.signs[:, list(subset)].prod(axis=1).astype(np.int64)


def assemble_constraints(scenario: Scenario, behavior: Behavior, eps_ns: float | None = None) -> ConstraintSystem:
    """Normalization, one row per variable mean, then each context's higher products.

    A moment seen by several contexts is entered once, from the first
    context declaring it; no-signaling makes the choice immaterial and
    keeps the rows linearly independent.
    """
    if behavior.scenario != scenario:
        raise ValueError("behavior belongs to a different scenario")
    report = check_no_signaling(behavior, eps_ns)
    if not report.passed:
        raise SignalingDetected(
            f"behavior signals (max discrepancy {report.max_discrepancy:.3g})", report
        )
    space = build_atom_space(scenario)
    names = scenario.variables
    moments = [moments_from_table(t) for t in behavior.tables]

    rows, rhs, labels, subsets = [_row(space, ())], [1], ["1"], [()]
    seen = {()}

    def add(k, pos):
        ctx = scenario.contexts[k]
        subset = tuple(sorted(ctx[i] for i in pos))
        if subset in seen:
            return
        seen.add(subset)
        key = tuple(names[ctx[i]] for i in pos)
        rows.append(_row(space, subset))
        rhs.append(moments[k][key])
        labels.append("<" + " ".join(key) + ">")
        subsets.append(subset)

    for j in range(scenario.n):
        k = next(k for k, c in enumerate(scenario.contexts) if j in c)
        add(k, (scenario.contexts[k].index(j),))
    for k, ctx in enumerate(scenario.contexts):
        for r in range(2, len(ctx) + 1):
            for pos in itertools.combinations(range(len(ctx)), r):
                add(k, pos)

    if behavior.exact:
        b = tuple(Fraction(v) for v in rhs)
    else:
        b = tuple(float(v) for v in rhs)
    return ConstraintSystem(space, np.vstack(rows), b, tuple(labels), tuple(subsets))


@dataclass(frozen=True, eq=False)
class SolutionFamily:
    """All solutions ``particular + coeffs @ basis`` of a constraint system."""

    space: AtomSpace
    particular: np.ndarray
    basis: np.ndarray     # shape (dim, 2**n)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def member(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs)
        if self.dim == 0:
            return self.particular.copy()
        return self.particular + coeffs @ self.basis

    def distance(self, point) -> float:
        """Euclidean distance from ``point`` to the affine family."""
        d = np.asarray(point, dtype=float) - self.particular.astype(float)
        if self.dim == 0:
            return float(np.linalg.norm(d))
        B = self.basis.astype(float).T
        coef, *_ = np.linalg.lstsq(B, d, rcond=None)
        return float(np.linalg.norm(d - B @ coef))


def solve_family(system: ConstraintSystem) -> SolutionFamily:
    """Particular solution and nullspace basis by exact elimination of ``A``.

    ``A`` is integer, so the row reduction is done in rationals; only the
    right-hand side may be floating point.
    """
    red = system._rref
    m, n = system.A.shape
    exact = system.exact
    if exact:
        tb = [sum((t * v for t, v in zip(row, system.b)), Fraction(0)) for row in red.T]
    else:
        T = np.array([[float(x) for x in row] for row in red.T])
        tb = list(T @ np.array(system.b, dtype=float))
    scale = max(1.0, max(abs(float(v)) for v in system.b))
    for i in range(red.rank, m):
        if (tb[i] != 0) if exact else abs(tb[i]) > 1e-9 * scale:
            raise InconsistentSystem(f"row combination {i} leaves residual {float(tb[i])!r}")
    if exact:
        p0 = np.array([Fraction(0)] * n, dtype=object)
    else:
        p0 = np.zeros(n)
    for row, c in enumerate(red.pivots):
        p0[c] = tb[row]
    null = nullspace(red, n)
    if exact:
        basis = np.array(null, dtype=object).reshape(len(null), n)
    else:
        basis = np.array([[float(x) for x in v] for v in null]).reshape(len(null), n)
    return SolutionFamily(system.space, p0, basis)


@dataclass(frozen=True, eq=False)
class SignedJoint:
    """Atom weights summing to one; ``mass = sum |p|``, ``delta = mass - 1``."""

    space: AtomSpace
    weights: np.ndarray
    mass: Number
    delta: Number

    @property
    def scenario(self) -> Scenario:
        return self.space.scenario

    @property
    def exact(self) -> bool:
        return self.weights.dtype == object

    def as_dict(self) -> dict[str, Number]:
        return dict(zip(self.space.labels, self.weights.tolist()))

    def weight(self, signs: Sequence[int]) -> Number:
        return self.weights[self.space.index_of(signs)]


def _from_weights(space, p) -> SignedJoint:
    if p.dtype == object:
        mass = sum((abs(x) for x in p), Fraction(0))
    else:
        mass = float(np.abs(p).sum())
    return SignedJoint(space, p, mass, mass - 1)


def solve_min_l1(system: ConstraintSystem, canonical: str = "maxent", tol=None) -> SignedJoint:
    """Least-mass signed joint via ``p = u - v``, minimize ``sum(u + v)``.

    The minimizer is generally not unique; ``mass`` and ``delta`` are.
    With ``canonical="maxent"`` a noncontextual system (delta within
    tolerance) returns the maximum-entropy nonnegative joint, found by
    iterative proportional fitting; ``"vertex"`` returns the simplex
    vertex as is.
    """
    if canonical not in ("maxent", "vertex"):
        raise ValueError(f"unknown canonical mode {canonical!r}")
    tol = tol or tolerances()
    A = system.A
    n = A.shape[1]
    exact = system.exact
    cost = [1] * (2 * n) if exact else np.ones(2 * n)
    res = linprog_bland(cost, np.hstack([A, -A]), system.b, exact=exact, feas_tol=tol.feas)
    if res.status != "optimal":
        raise InconsistentSystem(f"no signed solution ({res.status}, residual {float(res.infeasibility):.3g})")
    p = res.x[:n] - res.x[n:]
    joint = _from_weights(system.space, p)
    if canonical == "maxent" and joint.delta <= tol.delta:
        q = _ipf(system, exact)
        if q is not None:
            return _from_weights(system.space, q)
        log.info("proportional fitting did not converge; keeping simplex vertex")
    return joint


def nonneg_feasible(system: ConstraintSystem, tol=None) -> bool:
    """Whether some ``p >= 0`` satisfies ``A p = b`` (phase-1 feasibility)."""
    tol = tol or tolerances()
    n = system.A.shape[1]
    cost = [0] * n if system.exact else np.zeros(n)
    res = linprog_bland(cost, system.A, system.b, exact=system.exact, feas_tol=tol.feas)
    return res.status != "infeasible"


def _context_groups(space: AtomSpace, ctx: Sequence[int]) -> np.ndarray:
    """Outcome index (canonical order within the context) of every atom."""
    bits = (space.signs[:, list(ctx)] < 0).astype(np.int64)
    weights = 1 << np.arange(len(ctx) - 1, -1, -1)
    return bits @ weights


def _context_target(system: ConstraintSystem, ctx: Sequence[int]):
    """Context table implied by the system's moment rows (Walsh inversion)."""
    row_of = {s: r for r, s in enumerate(system.subsets)}
    size = len(ctx)
    outs = outcomes(size)
    scale = Fraction(1, 1 << size) if system.exact else 1.0 / (1 << size)
    target = []
    for o in outs:
        acc = 0
        for r in range(0, size + 1):
            for pos in itertools.combinations(range(size), r):
                subset = tuple(sorted(ctx[i] for i in pos))
                sign = 1
                for i in pos:
                    sign *= o[i]
                acc += sign * system.b[row_of[subset]]
        target.append(acc * scale)
    return target


def _ipf(system: ConstraintSystem, exact: bool, max_sweeps: int = 5000, tol: float = 1e-13):
    space = system.space
    ctxs = system.scenario.contexts
    groups = [_context_groups(space, c) for c in ctxs]
    targets = [_context_target(system, c) for c in ctxs]
    n = space.size
    if exact:
        p = [Fraction(1, n)] * n
        for _ in range(4):
            for g, t in zip(groups, targets):
                cur = [Fraction(0)] * len(t)
                for k, gk in enumerate(g):
                    cur[gk] += p[k]
                f = [ti / ci if ci != 0 else Fraction(0) for ti, ci in zip(t, cur)]
                p = [p[k] * f[gk] for k, gk in enumerate(g)]
            q = np.array(p, dtype=object)
            if system.residual(q) == 0:
                return q
        return None
    p = np.full(n, 1.0 / n)
    targets = [np.clip(np.array(t, dtype=float), 0.0, None) for t in targets]
    for _ in range(max_sweeps):
        for g, t in zip(groups, targets):
            cur = np.bincount(g, weights=p, minlength=len(t))
            f = np.divide(t, cur, out=np.zeros_like(t), where=cur > 0)
            p = p * f[g]
        if system.residual(p) <= tol:
            return p
    return None


def marginalize(joint: SignedJoint, context: Sequence[str | int], unsafe: bool = False, eps: float | None = None) -> ContextTable:
    """Sum atom weights over each joint outcome of ``context``.

    Declared contexts must come out as genuine probability tables.  Any
    other variable tuple is refused unless ``unsafe`` is set, in which
    case the signed (possibly negative) table is returned unchecked.
    """
    scenario = joint.scenario
    idx = scenario.resolve(context)
    declared = any(set(idx) == set(c) and len(idx) == len(c) for c in scenario.contexts)
    if not declared and not unsafe:
        raise NotAContext(f"{[scenario.variables[i] for i in idx]} is not a declared context")
    g = _context_groups(joint.space, idx)
    size = 1 << len(idx)
    if joint.exact:
        acc = [Fraction(0)] * size
        for k, gk in enumerate(g):
            acc[gk] += joint.weights[k]
    else:
        acc = np.bincount(g, weights=joint.weights.astype(float), minlength=size).tolist()
    names = tuple(scenario.variables[i] for i in idx)
    if unsafe:
        return ContextTable.unchecked(names, acc)
    eps = tolerances().norm if eps is None else eps
    if any(a < -eps for a in acc):
        raise NegativeMarginal(f"negative marginal on declared context {names}: {acc}")
    return ContextTable(names, tuple(a if a >= 0 else 0 * a for a in acc))
