import json
import subprocess
import sys

import pytest

from mocktheta.cli import build_parser, main
from mocktheta.identities import REGISTRY_SIZE


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines()]


def test_parse_verify_defaults():
    ns = build_parser().parse_args(["verify", "--suite", "all", "--tol", "1e-8", "--seed", "42"])
    assert (ns.suite, ns.tol, ns.seed, ns.samples, ns.q_order, ns.mode) == ("all", 1e-8, 42, 10, 6, "numeric")


def test_parse_eval_half_integers():
    ns = build_parser().parse_args(["eval", "phi", "--m", "3/2", "--s", "1/2", "--tau", "0+0.9i",
                                    "--z1", "0.2", "--z2", "0.07", "--t", "0"])
    assert str(ns.m) == "3/2" and str(ns.s) == "1/2"


def test_eval_routes_agree(capsys):
    base = ["eval", "phi", "--m", "3/2", "--s", "1/2", "--tau", "0+0.9i", "--z1", "0.2", "--z2", "0.07"]
    _, (direct,) = run(base, capsys)
    _, (plan,) = run(base + ["--route", "plan"], capsys)
    assert direct["value"]["im"][:15] == plan["value"]["im"][:15]


def test_character_scope_is_exit_2(capsys):
    code, (rec,) = run(["character", "--m", "2", "--m2", "5", "--tau", "0.9i"], capsys)
    assert code == 2 and rec["error"] == "UsageError"


def test_pole_is_structured_exit_2(capsys):
    code, (rec,) = run(["eval", "phi", "--m", "1", "--s", "0", "--tau", "0.9i", "--z1", "0", "--z2", "0.1"], capsys)
    assert code == 2 and rec["error"] == "PoleError"


def test_malformed_flags(capsys):
    code, (rec,) = run(["verify", "--samples", "ten"], capsys)
    assert code == 2 and "usage" in rec["message"]


def test_character_output_fields(capsys):
    code, (rec,) = run(["character", "--m", "3", "--m2", "2", "--sign", "minus", "--tau", "0.05+0.9i",
                        "--z", "0.13+0.02i"], capsys)
    assert code == 0
    assert {"m", "m2", "sign", "mode", "value", "route", "residual_vs_other_route"} <= set(rec)
    assert rec["residual_vs_other_route"] < 1e-8


def test_expand_character_is_deterministic(capsys):
    args = ["character", "--m", "2", "--m2", "0", "--q-order", "4"]
    main(args)
    first = capsys.readouterr().out
    main(args)
    assert capsys.readouterr().out == first
    assert "series" in json.loads(first)


def test_verify_exit_codes_and_summary(capsys):
    code, recs = run(["verify", "--suite", "PHI10_CLOSED,LEM35", "--samples", "2", "--grid-m", "1/2,3/2"], capsys)
    assert code == 0
    summary = recs[-1]
    assert summary["summary"] and set(summary["identities"]) == {"PHI10_CLOSED", "LEM35"}
    # an impossible tolerance makes the same checks fail
    code, recs = run(["verify", "--suite", "PHI10_CLOSED", "--samples", "2", "--tol", "0"], capsys)
    assert code == 1 and recs[-1]["failed"] == 1


def test_verify_single_params_both_modes(capsys):
    code, recs = run(["verify", "--suite", "DOUBLING", "--params", '{"m": "3/2"}', "--mode", "both",
                      "--samples", "2"], capsys)
    assert code == 0 and [r["mode"] for r in recs[:2]] == ["numeric", "formal"]


def test_out_file(tmp_path, capsys):
    path = tmp_path / "r.ndjson"
    assert main(["--out", str(path), "eval", "eta", "--tau", "0.9i"]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(path.read_text())["function"] == "eta"


def test_byte_identical_streams_across_processes():
    cmd = [sys.executable, "-m", "mocktheta", "verify", "--suite", "VARTHETA*", "--samples", "3", "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True, env={"MOCKTHETA_WORKERS": "2", "PATH": ""}).stdout
    assert a == b and a


def test_list_catalogue(capsys):
    code, recs = run(["verify", "--list"], capsys)
    assert code == 0 and len(recs) == REGISTRY_SIZE
