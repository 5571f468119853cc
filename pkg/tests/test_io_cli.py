import json
import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sigmaq import cli, io
from sigmaq.joint import assemble_constraints, solve_family, solve_min_l1
from sigmaq.ks import cabello_set
from sigmaq.quantum import bell_behavior, pr_box_behavior, product_behavior


def run(args, stdin=None, env=None):
    import os

    full_env = dict(os.environ)
    full_env.update(env or {})
    return subprocess.run(
        [sys.executable, "-m", "sigmaq", *args], input=stdin, capture_output=True, text=True, env=full_env
    )


@pytest.fixture
def bell_json():
    return io.dumps(io.behavior_to_dict(bell_behavior()))


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_dumps_round_trips_floats(x):
    assert json.loads(io.dumps({"x": x}))["x"] == x


def test_dumps_fractions_and_numpy():
    out = json.loads(io.dumps({"f": Fraction(1, 3), "a": np.arange(2), "g": np.float64(0.1)}))
    assert out == {"f": "1/3", "a": [0, 1], "g": 0.1}
    with pytest.raises(ValueError):
        io.dumps(math.inf)


def test_behavior_round_trip_is_exact():
    b = pr_box_behavior()
    again = io.behavior_from_dict(json.loads(io.dumps(io.behavior_to_dict(b))))
    assert again == b and again.exact


def test_behavior_round_trip_float():
    b = bell_behavior()
    assert io.behavior_from_dict(json.loads(io.dumps(io.behavior_to_dict(b)))) == b


def test_permuted_context_order_is_accepted():
    d = io.behavior_to_dict(product_behavior([0.5, 0, -0.5, 0]))
    t = d["tables"][0]
    t["context"] = t["context"][::-1]
    t["p"] = {k[::-1]: v for k, v in t["p"].items()}
    assert io.behavior_from_dict(d) == product_behavior([0.5, 0, -0.5, 0])


def test_ksset_round_trip():
    ks = cabello_set()
    assert io.ksset_from_dict(json.loads(io.dumps(io.ksset_to_dict(ks)))) == ks


def test_solution_dict_and_csv():
    b = pr_box_behavior()
    s = assemble_constraints(b.scenario, b)
    joint = solve_min_l1(s)
    d = io.solution_to_dict(joint, solve_family(s), include_family=True)
    assert d["exact"]["delta"] == "1" and d["family_dim"] == 7
    assert len(d["family"]["basis"]) == 7
    lines = io.solution_to_csv(joint).splitlines()
    assert lines[0] == "atom,p" and len(lines) == 17


def test_validate_exit_codes(tmp_path, bell_json):
    assert cli.main(["validate", _write(tmp_path, "b.json", bell_json)]) == 0
    d = json.loads(bell_json)
    d["tables"][0]["p"]["++"] += 0.05
    d["tables"][0]["p"]["+-"] -= 0.05
    assert cli.main(["validate", _write(tmp_path, "p.json", json.dumps(d))]) == 3
    assert cli.main(["validate", _write(tmp_path, "t.json", bell_json[:40])]) == 2
    assert cli.main(["validate", str(tmp_path / "missing.json")]) == 2


def test_perturbed_file_reports_discrepancy(bell_json):
    d = json.loads(bell_json)
    d["tables"][0]["p"]["++"] += 0.05
    d["tables"][0]["p"]["+-"] -= 0.05
    r = run(["validate"], stdin=json.dumps(d))
    assert r.returncode == 3
    assert json.loads(r.stdout)["max_discrepancy"] == pytest.approx(0.05, abs=1e-12)


@pytest.mark.parametrize("payload", ["", "[]", "{}", '{"scenario": 3, "tables": []}', "null",
                                     '{"scenario": {"variables": ["A"], "contexts": [["A"]]}, '
                                     '"tables": [{"context": ["A"], "p": {"+": "x", "-": 1}}]}'])
def test_malformed_input_exits_2(payload):
    for cmd in ("validate", "solve", "chsh"):
        r = run([cmd], stdin=payload)
        assert r.returncode == 2, (cmd, payload, r.stderr)
        assert "Traceback" not in r.stderr


def test_generate_solve_pipe_matches_in_process():
    gen = run(["generate", "--kind", "bell"])
    assert gen.returncode == 0
    solved = run(["solve"], stdin=gen.stdout)
    assert solved.returncode == 0
    b = io.behavior_from_dict(json.loads(gen.stdout))
    s = assemble_constraints(b.scenario, b)
    expected = io.dumps(io.solution_to_dict(solve_min_l1(s), solve_family(s))) + "\n"
    assert solved.stdout == expected
    assert json.loads(solved.stdout)["delta"] == pytest.approx(math.sqrt(2) - 1, abs=1e-9)


def test_solve_prbox_exact():
    gen = run(["generate", "--kind", "prbox"])
    out = json.loads(run(["solve", "--exact"], stdin=gen.stdout).stdout)
    assert out["exact"]["delta"] == "1"


def test_solve_product_and_report():
    gen = run(["generate", "--kind", "product", "--biases=0.2,-1/2,0,1"])
    r = run(["solve", "--report", "--family"], stdin=gen.stdout)
    out = json.loads(r.stdout)
    assert out["delta"] == 0
    rep = out["report"]
    assert rep["no_signaling"] and rep["nonneg_feasible"] and rep["family_dim"] == 7
    assert max(rep["marginal_errors"].values()) < 1e-12
    assert "chsh" in rep and len(rep["input_sha256"]) == 64
    assert "family" in out


def test_solve_csv():
    gen = run(["generate", "--kind", "bell"])
    r = run(["solve", "--csv"], stdin=gen.stdout)
    assert r.stdout.startswith("atom,p\n++++,")


def test_solve_signaling_exit_3(bell_json):
    d = json.loads(bell_json)
    d["tables"][1]["p"]["++"] += 0.05
    d["tables"][1]["p"]["-+"] -= 0.05
    assert run(["solve"], stdin=json.dumps(d)).returncode == 3


def test_chsh_command():
    gen = run(["generate", "--kind", "prbox"])
    out = json.loads(run(["chsh"], stdin=gen.stdout).stdout)
    assert out["max_abs"] == 4 and len(out["variants"]) == 8


def test_chsh_wrong_shape_exit_2():
    d = {"scenario": {"variables": ["X", "Y"], "contexts": [["X", "Y"]]},
         "tables": [{"context": ["X", "Y"], "p": {"++": 0.25, "+-": 0.25, "-+": 0.25, "--": 0.25}}]}
    assert run(["chsh"], stdin=json.dumps(d)).returncode == 2


def test_ks_default_report():
    r = run(["ks"])
    assert r.returncode == 0
    assert "orthogonality: pass" in r.stdout and "UNSAT" in r.stdout
    out = json.loads(run(["ks", "--json"]).stdout)
    assert out["parity_obstruction"] and out["valuation"] is None


def test_ks_user_files(tmp_path):
    single = {"vectors": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "contexts": [[0, 1, 2]]}
    out = json.loads(run(["ks", "--json", _write(tmp_path, "s.json", json.dumps(single))]).stdout)
    assert out["valuation"] is not None
    skew = {"vectors": [[1, 0], [1, 1]], "contexts": [[0, 1]]}
    r = run(["ks", _write(tmp_path, "k.json", json.dumps(skew))])
    assert "orthogonality: FAIL" in r.stdout and "<v0,v1>=1" in r.stdout
    assert run(["ks", _write(tmp_path, "bad.json", "{")]).returncode == 2


def test_batch_mode(tmp_path, bell_json):
    d = tmp_path / "in"
    d.mkdir()
    (d / "bell.json").write_text(bell_json)
    (d / "broken.json").write_text("{")
    r = run(["solve", "--batch", str(d)])
    out = json.loads(r.stdout)
    assert set(out) == {"bell.json", "broken.json"}
    assert out["bell.json"]["exit"] == 0 and out["broken.json"]["exit"] == 2
    assert r.returncode == 2


def test_env_tolerance(bell_json):
    assert run(["validate"], stdin=bell_json, env={"SIGMAQ_TOL": "ns=1e-3"}).returncode == 0
    assert run(["validate"], stdin=bell_json, env={"SIGMAQ_TOL": "bogus=1"}).returncode == 2


def test_selftest_is_hidden_and_runs():
    assert "selftest" not in run(["--help"]).stdout
    r = run(["selftest", "--seed", "3", "--count", "10"])
    assert r.returncode == 0
    assert json.loads(r.stdout)["prop6_disagreements"] == 0


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)
