"""Command-line entry point.

Exit codes: 0 success, 2 malformed input, 3 signaling detected,
4 inconsistent constraint system.  Every subcommand reads stdin when no
file is given.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io
from .behavior import Behavior, ContextTable, check_no_signaling, chsh_values
from .errors import InconsistentSystem, SigmaqError, SignalingDetected, WrongScenarioShape
from .joint import assemble_constraints, marginalize, nonneg_feasible, solve_family, solve_min_l1
from .ks import cabello_set, parity_obstruction, search_noncontextual_valuation, verify_orthogonal_bases
from .numeric import tolerances, to_exact
from .quantum import bell_behavior, pr_box_behavior, product_behavior, product_joint

log = logging.getLogger("sigmaq")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SIGNALING = 3
EXIT_INCONSISTENT = 4


class InputError(Exception):
    pass


@dataclass
class Outcome:
    code: int
    payload: object = None   # dict rendered as JSON, or str printed verbatim


def _read(path: str | None) -> bytes:
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _parse_behavior(raw: bytes) -> Behavior:
    try:
        return io.behavior_from_dict(json.loads(raw))
    except (ValueError, KeyError, TypeError, IndexError, AttributeError, SigmaqError) as exc:
        raise InputError(f"malformed behavior: {exc}") from exc


def _exactify(b: Behavior) -> Behavior:
    tables = tuple(ContextTable(t.variables, tuple(to_exact(p) for p in t.probs)) for t in b.tables)
    return Behavior(b.scenario, tables)


def run_validate(raw: bytes, args) -> Outcome:
    behavior = _parse_behavior(raw)
    report = check_no_signaling(behavior)
    return Outcome(EXIT_OK if report.passed else EXIT_SIGNALING, report.to_dict(behavior.scenario))


def run_solve(raw: bytes, args) -> Outcome:
    start = time.perf_counter()
    behavior = _parse_behavior(raw)
    if args.exact:
        behavior = _exactify(behavior)
    try:
        system = assemble_constraints(behavior.scenario, behavior)
    except SignalingDetected as exc:
        return Outcome(EXIT_SIGNALING, {"error": str(exc), "no_signaling": exc.report.to_dict(behavior.scenario)})
    try:
        family = solve_family(system)
        joint = solve_min_l1(system, canonical="vertex" if args.vertex else "maxent")
    except InconsistentSystem as exc:
        return Outcome(EXIT_INCONSISTENT, {"error": str(exc)})
    if args.csv:
        return Outcome(EXIT_OK, io.solution_to_csv(joint))
    out = io.solution_to_dict(joint, family, include_family=args.family)
    if args.report:
        out["report"] = _run_report(raw, behavior, system, joint, family, start)
    return Outcome(EXIT_OK, out)


def _run_report(raw, behavior, system, joint, family, start) -> dict:
    scenario = behavior.scenario
    errors = {}
    for k in range(len(scenario.contexts)):
        names = scenario.context_names(k)
        got = marginalize(joint, names, unsafe=True).probs
        want = behavior.tables[k].probs
        errors[" ".join(names)] = max(abs(float(a) - float(b)) for a, b in zip(got, want))
    ns = check_no_signaling(behavior)
    report = {
        "input_sha256": hashlib.sha256(raw).hexdigest(),
        "no_signaling": ns.passed,
        "max_signaling_discrepancy": ns.max_discrepancy,
        "nonneg_feasible": nonneg_feasible(system),
        "delta": float(joint.delta),
        "mass": float(joint.mass),
        "family_dim": family.dim,
        "marginal_errors": errors,
    }
    try:
        report["chsh"] = chsh_values(behavior).to_dict()
    except WrongScenarioShape:
        pass
    report["wall_time_s"] = time.perf_counter() - start
    return report


def run_chsh(raw: bytes, args) -> Outcome:
    behavior = _parse_behavior(raw)
    try:
        report = chsh_values(behavior)
    except WrongScenarioShape as exc:
        raise InputError(str(exc)) from exc
    return Outcome(EXIT_OK, report.to_dict())


def ks_report(ks) -> dict:
    ortho = verify_orthogonal_bases(ks)
    valuation = search_noncontextual_valuation(ks)
    return {
        "vectors": len(ks.vectors),
        "contexts": len(ks.contexts),
        "multiplicities": ks.multiplicities(),
        "orthogonality_ok": ortho.ok,
        "orthogonality_failures": [
            {"context": list(a.context), "nonzero_dots": [list(d) for d in a.nonzero_dots],
             "independent": a.independent}
            for a in ortho.failures()
        ],
        "parity_obstruction": parity_obstruction(ks),
        "valuation": list(valuation) if valuation is not None else None,
    }


def _ks_text(ks, rep: dict) -> str:
    lines = [
        f"KS set: {rep['vectors']} vectors in dimension {ks.dimension}, {rep['contexts']} contexts",
        f"orthogonality: {'pass' if rep['orthogonality_ok'] else 'FAIL'}",
    ]
    for f in rep["orthogonality_failures"]:
        dots = ", ".join(f"<v{i},v{j}>={d}" for i, j, d in f["nonzero_dots"])
        extra = "" if f["independent"] else " (dependent)"
        lines.append(f"  context {f['context']}: {dots or 'orthogonal'}{extra}")
    mults = sorted(set(rep["multiplicities"]))
    lines.append(f"ray multiplicities: {mults}")
    lines.append(f"parity obstruction: {'yes' if rep['parity_obstruction'] else 'no'}")
    if rep["valuation"] is None:
        lines.append("valuation search: UNSAT (no noncontextual 0/1 assignment)")
    else:
        ones = [i for i, v in enumerate(rep["valuation"]) if v == 1]
        lines.append(f"valuation search: found, rays set to 1: {ones}")
    return "\n".join(lines)


def cmd_ks(args) -> int:
    if args.file is None:
        ks = cabello_set()
    else:
        try:
            ks = io.ksset_from_dict(json.loads(_read(args.file)))
        except (ValueError, KeyError, TypeError, SigmaqError) as exc:
            print(f"error: malformed KS set: {exc}", file=sys.stderr)
            return EXIT_PARSE
    rep = ks_report(ks)
    print(io.dumps(rep) if args.json else _ks_text(ks, rep))
    return EXIT_OK


def generate(kind: str, biases=None) -> Behavior:
    if kind == "bell":
        return bell_behavior()
    if kind == "prbox":
        return pr_box_behavior()
    if kind == "product":
        return product_behavior(biases if biases is not None else [0, 0, 0, 0])
    raise ValueError(f"unknown kind {kind!r}")


def cmd_generate(args) -> int:
    try:
        biases = [b for group in args.biases for b in group] if args.biases else None
        behavior = generate(args.kind, biases)
    except (ValueError, SigmaqError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(io.dumps(io.behavior_to_dict(behavior)))
    return EXIT_OK


def cmd_selftest(args) -> int:
    """Randomized agreement checks between delta, feasibility and product joints."""
    from .sampling import random_ns_behavior, random_product_biases

    rng = np.random.default_rng(args.seed)
    tol = tolerances()
    disagreements = 0
    product_errors = []
    for _ in range(args.count):
        b = random_ns_behavior(rng)
        system = assemble_constraints(b.scenario, b)
        if (solve_min_l1(system).delta <= tol.delta) != nonneg_feasible(system):
            disagreements += 1
        biases = random_product_biases(rng)
        pb = product_behavior(biases)
        joint = solve_min_l1(assemble_constraints(pb.scenario, pb))
        product_errors.append(float(np.max(np.abs(joint.weights - np.array(product_joint(biases))))))
    out = {
        "seed": args.seed,
        "count": args.count,
        "prop6_disagreements": disagreements,
        "max_product_joint_error": max(product_errors, default=0.0),
    }
    print(io.dumps(out))
    return EXIT_OK if disagreements == 0 and out["max_product_joint_error"] <= 1e-8 else 1


RUNNERS = {"validate": run_validate, "solve": run_solve, "chsh": run_chsh}


def _emit(outcome: Outcome):
    if isinstance(outcome.payload, str):
        sys.stdout.write(outcome.payload)
    elif outcome.payload is not None:
        print(io.dumps(outcome.payload))


def _run_one(name, raw, args) -> Outcome:
    try:
        return RUNNERS[name](raw, args)
    except InputError as exc:
        return Outcome(EXIT_PARSE, {"error": str(exc)})


def cmd_behavior(args) -> int:
    if args.batch:
        files = sorted(Path(args.batch).glob("*.json"))
        results = {}
        code = EXIT_OK
        for f in files:
            out = _run_one(args.command, f.read_bytes(), args)
            payload = out.payload
            if isinstance(payload, str):
                payload = {"csv": payload}
            results[f.name] = {"exit": out.code, "result": payload}
            code = max(code, out.code)
        print(io.dumps(results))
        return code
    try:
        raw = _read(args.file)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    out = _run_one(args.command, raw, args)
    if out.code == EXIT_PARSE:
        print(f"error: {out.payload['error']}", file=sys.stderr)
        return out.code
    _emit(out)
    return out.code


def _biases(text: str) -> list:
    # comma lists let a leading negative fraction through: --biases=-1/2,0,0,1
    return [Fraction(t) if "/" in t else float(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sigmaq", description="Signed joint distributions for contextual behaviors.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def behavior_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", nargs="?", help="behavior JSON (stdin if omitted)")
        sp.add_argument("--batch", metavar="DIR", help="process every *.json in DIR")
        sp.set_defaults(func=cmd_behavior)
        return sp

    behavior_cmd("validate", "check no-signaling")
    sp = behavior_cmd("solve", "minimal-L1 signed joint and contextuality index")
    sp.add_argument("--exact", action="store_true", help="convert all entries to rationals")
    sp.add_argument("--family", action="store_true", help="include the affine solution family")
    sp.add_argument("--csv", action="store_true", help="print the atom table as CSV")
    sp.add_argument("--report", action="store_true", help="append a run report")
    sp.add_argument("--vertex", action="store_true", help="return the raw simplex vertex")
    behavior_cmd("chsh", "all eight CHSH sign variants")

    sp = sub.add_parser("ks", help="Kochen-Specker obstruction report")
    sp.add_argument("file", nargs="?", help="KS set JSON (bundled 18-vector set if omitted)")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_ks)

    sp = sub.add_parser("generate", help="emit a canonical behavior as JSON")
    sp.add_argument("--kind", choices=["bell", "prbox", "product"], required=True)
    sp.add_argument("--biases", nargs="+", type=_biases,
                    help="per-variable means for --kind product, space or comma separated")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("selftest")   # no help: hidden from the listing
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=50)
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        tolerances()
    except ValueError as exc:
        print(f"error: SIGMAQ_TOL: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
