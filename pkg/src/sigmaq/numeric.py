"""Number coercion and tolerance settings.

Two arithmetic modes coexist: plain floats, and exact ``Fraction`` values
when every input entry is rational.  The helpers here decide which one a
collection of values lives in.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

Number = Union[float, Fraction]

ENV_VAR = "SIGMAQ_TOL"


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-9   # table normalization / nonnegativity slack
    ns: float = 1e-9     # no-signaling marginal discrepancy
    delta: float = 1e-7  # delta <= this counts as noncontextual
    feas: float = 1e-9   # phase-1 residual accepted as feasible

    @classmethod
    def from_env(cls, value: str | None = None) -> "Tolerances":
        """Parse ``SIGMAQ_TOL``: either ``key=val,...`` or one bare float (norm and ns)."""
        if value is None:
            value = os.environ.get(ENV_VAR, "")
        value = value.strip()
        tol = cls()
        if not value:
            return tol
        if "=" not in value:
            x = float(value)
            return replace(tol, norm=x, ns=x)
        fields = {}
        for part in value.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            if key not in ("norm", "ns", "delta", "feas"):
                raise ValueError(f"unknown tolerance key {key!r} in {ENV_VAR}")
            fields[key] = float(val)
        return replace(tol, **fields)


def tolerances() -> Tolerances:
    return Tolerances.from_env()


def parse_number(value) -> Number:
    """Coerce a JSON scalar or user string to ``Fraction`` (exact) or ``float``.

    Integers and ``"num/den"`` strings are exact; JSON floats stay floats.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        s = value.strip().replace("−", "-")
        if "/" in s:
            return Fraction(s)
        try:
            return Fraction(int(s))
        except ValueError:
            return float(s)
    # numpy scalars and the like
    return float(value)


def to_exact(value) -> Fraction:
    """Exact rational for a value; floats go through their shortest repr."""
    value = parse_number(value)
    if isinstance(value, Fraction):
        return value
    return Fraction(repr(value))


def is_exact(values: Iterable) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def unify(values: Iterable) -> list[Number]:
    """All-Fraction if every entry is exact, otherwise all-float."""
    vals = [parse_number(v) for v in values]
    if is_exact(vals):
        return vals
    return [float(v) for v in vals]


def format_number(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return format(float(x), ".17g")
