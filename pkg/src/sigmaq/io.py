"""JSON and CSV formats for scenarios, behaviors, KS sets and solutions.

Floats are written with 17 significant digits so they round-trip
bit-for-bit; exact rationals are written as ``"num/den"`` strings.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import re
from fractions import Fraction
from typing import Any

import numpy as np

from .behavior import Behavior, ContextTable
from .errors import InvalidTable
from .joint import SignedJoint, SolutionFamily
from .ks import KSSet
from .numeric import format_number
from .scenario import Scenario, key_to_signs, signs_to_key

_MARK = "@@f17:"
_MARK_RE = re.compile('"' + re.escape(_MARK) + r'([^"]*)"')


def _prepare(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)) and not isinstance(obj, np.integer):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialize {x}")
        return _MARK + format(x, ".17g")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_prepare(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int | None = 2) -> str:
    """``json.dumps`` with 17-significant-digit floats and Fractions as strings."""
    text = json.dumps(_prepare(obj), indent=indent, ensure_ascii=False)
    return _MARK_RE.sub(lambda m: m.group(1), text)


def scenario_to_dict(s: Scenario) -> dict:
    return {"variables": list(s.variables), "contexts": [list(s.context_names(k)) for k in range(len(s.contexts))]}


def scenario_from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict) or "variables" not in d or "contexts" not in d:
        raise InvalidTable("scenario needs 'variables' and 'contexts'")
    return Scenario.from_names(d["variables"], d["contexts"])


def _number_out(x):
    return x if isinstance(x, Fraction) else float(x)


def behavior_to_dict(b: Behavior) -> dict:
    return {
        "scenario": scenario_to_dict(b.scenario),
        "tables": [
            {"context": list(t.variables), "p": {k: _number_out(v) for k, v in t.as_dict().items()}}
            for t in b.tables
        ],
    }


def behavior_from_dict(d: dict) -> Behavior:
    if not isinstance(d, dict) or "scenario" not in d or "tables" not in d:
        raise InvalidTable("behavior needs 'scenario' and 'tables'")
    scenario = scenario_from_dict(d["scenario"])
    tables: dict[tuple[str, ...], ContextTable] = {}
    for entry in d["tables"]:
        names = tuple(entry["context"])
        p = entry["p"]
        if not isinstance(p, dict):
            raise InvalidTable("table 'p' must map outcome keys to probabilities")
        k = next(
            (k for k in range(len(scenario.contexts))
             if set(scenario.context_names(k)) == set(names) and len(names) == len(scenario.contexts[k])),
            None,
        )
        if k is None:
            raise InvalidTable(f"table for undeclared context {list(names)}")
        declared = scenario.context_names(k)
        if names != declared:
            # reorder outcome keys to the declared variable order
            perm = [names.index(v) for v in declared]
            p = {signs_to_key(tuple(key_to_signs(key)[i] for i in perm)): v for key, v in p.items()}
        if declared in tables:
            raise InvalidTable(f"two tables for context {list(declared)}")
        tables[declared] = ContextTable.from_mapping(declared, p)
    missing = [list(scenario.context_names(k)) for k in range(len(scenario.contexts))
               if scenario.context_names(k) not in tables]
    if missing:
        raise InvalidTable(f"no table for contexts {missing}")
    return Behavior(scenario, tuple(tables[scenario.context_names(k)] for k in range(len(scenario.contexts))))


def ksset_to_dict(ks: KSSet) -> dict:
    return {"vectors": [list(v) for v in ks.vectors], "contexts": [list(c) for c in ks.contexts]}


def ksset_from_dict(d: dict) -> KSSet:
    if not isinstance(d, dict) or "vectors" not in d or "contexts" not in d:
        raise ValueError("KS set needs 'vectors' and 'contexts'")
    return KSSet(tuple(map(tuple, d["vectors"])), tuple(map(tuple, d["contexts"])))


def solution_to_dict(joint: SignedJoint, family: SolutionFamily | None = None, include_family: bool = False) -> dict:
    out = {
        "atoms": joint.space.labels,
        "p": [float(x) for x in joint.weights],
        "mass": float(joint.mass),
        "delta": float(joint.delta),
        "family_dim": family.dim if family is not None else None,
    }
    if joint.exact:
        out["exact"] = {
            "p": [str(x) for x in joint.weights],
            "mass": str(joint.mass),
            "delta": str(joint.delta),
        }
    if include_family and family is not None:
        out["family"] = {
            "particular": [_number_out(x) for x in family.particular],
            "basis": [[_number_out(x) for x in row] for row in family.basis],
        }
    return out


def solution_to_csv(joint: SignedJoint) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["atom", "p"])
    for label, x in zip(joint.space.labels, joint.weights):
        w.writerow([label, format_number(x)])
    return buf.getvalue()


__all__ = [
    "dumps",
    "scenario_to_dict",
    "scenario_from_dict",
    "behavior_to_dict",
    "behavior_from_dict",
    "ksset_to_dict",
    "ksset_from_dict",
    "solution_to_dict",
    "solution_to_csv",
]
