import json
import subprocess
import sys

import jsonschema
import pytest

from blform.cli import main
from blform.schemas import INPUT_SCHEMAS, OUTPUT_SCHEMAS, dumps

TRIANGLE = {"vectors": [[1, 0], [0, 1], [1, 1]]}
HALF6 = ["1/2"] * 6
G = {"kind": "gaussian", "width": 1}
D = {"kind": "disk", "radius": 1}

CASES = {
    "rank": {"family": 1, "subset": [0, 1, 2]},
    "closure": {"family": 1, "subset": [0, 2]},
    "bases": {"matroid": TRIANGLE},
    "flats": {"matroid": TRIANGLE},
    "membership": {"family": 1, "theta": HALF6},
    "margin": {"family": 1, "theta": HALF6},
    "vertices": {"matroid": TRIANGLE},
    "constant": {"family": 2, "ell": 2},
    "family-build": {"n": 1},
    "family-verify": {"n": 1, "samples": 100, "seg_samples": 10},
    "estimate": {"n": 0, "t": D, "q": [D], "samples": 20000, "seed": 1},
    "verify-estimate": {"n": 1, "t": G, "q": [G, G, G], "samples": 20000, "seed": 1},
}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_every_subcommand_has_a_case():
    assert set(CASES) == set(INPUT_SCHEMAS)


@pytest.mark.parametrize("cmd", sorted(CASES))
def test_round_trip(cmd, capsys):
    code, out, _ = run(capsys, cmd, "-j", json.dumps(CASES[cmd]))
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, OUTPUT_SCHEMAS[cmd])
    assert json.loads(dumps(data)) == data


def test_general_estimate(capsys):
    inp = {"vectors": [[1, 0], [0, 1], [1, 1]], "functions": [dict(G, dim=1)] * 3, "ell": 1, "samples": 20000}
    code, out, _ = run(capsys, "estimate", "-j", json.dumps(inp))
    assert code == 0 and abs(json.loads(out)["value"] - 3**-0.5) < 0.02


def test_membership_example(capsys):
    code, out, _ = run(capsys, "membership", "-j", json.dumps(CASES["membership"]))
    assert code == 0 and json.loads(out) == {"member": True, "margin": "1/2"}


def test_membership_certificate(capsys):
    code, out, _ = run(capsys, "membership", "-j", json.dumps({"family": 1, "theta": [1, 1, 1, 0, 0, 0]}))
    assert code == 0
    assert json.loads(out)["violation"] == {"kind": "rank", "subset": [0, 1, 2], "rank": 2, "theta_sum": "3"}


def test_family_verify_example(capsys):
    code, out, _ = run(capsys, "family-verify", "--n", "1", "--delta", "1/10")
    rep = json.loads(out)
    assert code == 0 and rep["p_delta"]["violations"] == 0 and rep["p_delta"]["samples"] == 1000


def test_exit_1_domain(capsys):
    code, out, err = run(capsys, "bases", "-j", json.dumps({"matroid": {"vectors": [[1, 0], [2, 0]]}}))
    assert code == 1 and out == "" and err
    assert run(capsys, "margin", "-j", json.dumps({"family": 1, "theta": [0] * 6}))[0] == 1
    assert run(capsys, "family-build", "--n", "9")[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["membership", "-j", json.dumps({"family": 1, "theta": ["1/2"] * 5})],
        ["membership", "-j", "{not json"],
        ["membership", "-j", json.dumps({"family": 1})],
        ["membership", "-j", json.dumps({"family": 1, "theta": [0.5] * 6})],
        ["rank", "-j", json.dumps({"family": 1, "subset": [7]})],
        ["estimate", "-j", json.dumps({"n": 1, "t": G, "q": [G]})],
        ["estimate", "-i", "/nonexistent/input.json"],
        ["family-verify", "--n", "1", "--threads", "0"],
    ],
)
def test_exit_2_malformed(argv, capsys):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


def test_exit_3_when_a_check_fails(capsys, monkeypatch):
    # the proven statements cannot be broken by honest input, so swap in a
    # membership oracle that rejects everything and check the plumbing
    import blform.family as fam
    from blform.polytope import MembershipVerdict, RankViolation

    monkeypatch.setattr(fam, "membership", lambda M, th: MembershipVerdict(False, violation=RankViolation(1, 0, th[0])))
    code, out, err = run(capsys, "family-verify", "-j", json.dumps({"n": 1, "samples": 5, "seg_samples": 2}))
    rep = json.loads(out)
    assert code == 3 and not rep["ok"] and rep["p_delta"]["violations"] == 5 and err


def test_exit_3_on_property_violation(capsys, monkeypatch):
    import blform.cli as cli
    from blform.errors import PropertyViolation

    def boom(*a, **k):
        raise PropertyViolation("rank additivity fails", witness=[0])

    monkeypatch.setattr(cli, "family_report", boom)
    code, out, _ = run(capsys, "family-verify", "--n", "1")
    assert code == 3 and out == ""


def test_exit_1_zero_function(capsys):
    inp = {"n": 0, "t": dict(D, amplitude=0), "q": [D], "samples": 100}
    assert run(capsys, "verify-estimate", "-j", json.dumps(inp))[0] == 1


def test_output_file_and_stdin(tmp_path, capsys, monkeypatch):
    import io

    target = tmp_path / "out.json"
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(CASES["rank"])))
    code, out, _ = run(capsys, "rank", "-i", "-", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text()) == {"subset": [0, 1, 2], "rank": 2}


def test_deterministic_stdout_subprocess():
    args = [sys.executable, "-m", "blform.cli", "estimate", "-j", json.dumps(CASES["estimate"])]
    a = subprocess.run(args, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(args + ["--threads", "3"], capture_output=True, text=True, check=True).stdout
    assert a == b and json.loads(a)["seed"] == 1
