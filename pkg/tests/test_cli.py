import json
import os

import pytest

from cdmgraph.cli import main

from conftest import FORMULAS, GRAPHS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def graph(name):
    return os.path.join(GRAPHS, name)


def test_encode_text_and_json(capsys):
    code, out, _ = run(capsys, "encode", graph("edge.graph"))
    assert code == 0 and "order 180" in out and "tag W" in out
    code, out, _ = run(capsys, "encode", graph("edge.graph"), "--json")
    data = json.loads(out)
    assert data["command"] == "encode"
    assert data["results"][0]["order"] == 180
    assert data["params"]["p"] == 3


def test_global_flags_before_or_after(capsys):
    a = run(capsys, "--json", "--q", "7", "encode", graph("edge.graph"))
    b = run(capsys, "encode", graph("edge.graph"), "--q", "7", "--json")
    assert a == b
    assert json.loads(a[1])["results"][0]["order"] == 6 * 6 * 7


def test_json_is_deterministic(capsys):
    outs = {run(capsys, "--json", "width", graph("pair_c2.json"), "--all")[1] for _ in range(2)}
    assert len(outs) == 1


def test_encode_c2_override(capsys):
    code, out, _ = run(capsys, "--json", "encode", graph("point.graph"), "--c2", "2")
    assert json.loads(out)["results"][0]["order"] == 24


def test_nsubs(capsys):
    code, out, _ = run(capsys, "nsubs", graph("edge.graph"))
    assert code == 0 and out.startswith("15 normal subgroups")


def test_width(capsys):
    code, out, _ = run(capsys, "--json", "width", graph("pair_c2.json"), "--all")
    widths = sorted(str(r["width"]) for r in json.loads(out)["results"])
    assert widths == ["1", "1", "2", "inf", "inf", "inf", "inf"]


def test_decode_both_routes(capsys):
    for extra in ([], ["--oracle"]):
        code, out, _ = run(capsys, "decode", graph("path3.graph"), *extra)
        assert code == 0 and "isomorphic to input: yes" in out


def test_decode_from_exported_system(capsys, tmp_path):
    code, out, _ = run(capsys, "export", graph("edge.graph"))
    path = tmp_path / "sys.json"
    path.write_text(out)
    code, out, _ = run(capsys, "decode", str(path))
    # an abstract system carries no vertex labels, so classes are named by id
    assert code == 0 and out.count("vertex ") == 2 and out.count("edge ") == 1


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", graph("edge.graph"), "-b", "vertex")
    assert code == 0 and out.startswith("2 solutions")
    code, out, _ = run(capsys, "--json", "eval", graph("edge.graph"), "-f", os.path.join(FORMULAS, "reflexive.lis"))
    assert json.loads(out)["results"][0]["value"] is True


def test_gcl_and_frattini(capsys):
    code, out, _ = run(capsys, "gcl", graph("edge.graph"), "--elements", "0")
    assert code == 0 and out.startswith("classes 0")
    code, out, _ = run(capsys, "frattini", graph("point.graph"))
    assert code == 0 and "order 1" in out


def test_export_dot(capsys):
    code, out, _ = run(capsys, "export", graph("point.graph"), "--dot")
    assert code == 0 and out.startswith("digraph classes")


def test_lemmas_and_verify(capsys):
    code, out, _ = run(capsys, "lemmas")
    assert "exchange-steinitz" in out.split()
    code, out, _ = run(capsys, "verify", "parity")
    assert code == 0 and out.count("PASS") == 2
    code, out, _ = run(capsys, "verify", "all", "--instances", "tiny")
    assert code == 0 and "FAIL" not in out


def test_literal_exchange_fails_with_exit_one(capsys):
    code, out, _ = run(capsys, "--json", "verify", "exchange")
    assert code == 1
    statuses = {r["instance"]: r["status"] for r in json.loads(out)["results"]}
    assert statuses["a"] == "PASS" and statuses["a,b"] == "FAIL"


@pytest.mark.parametrize("argv, code, prefix", [
    (["encode"], 2, "error:"),
    (["frobnicate"], 2, "error:"),
    (["--p", "4", "encode", "x"], 2, "error:"),
    (["encode", "no/such/file.graph"], 2, "error:"),
    (["verify", "no-such-lemma"], 2, "error:"),
    (["eval", os.path.join(GRAPHS, "point.graph"), "-b", "phi(0)"], 2, "error:"),
    (["--max-order", "100", "nsubs", os.path.join(GRAPHS, "edge.graph")], 3, "budget:"),
])
def test_errors(capsys, argv, code, prefix):
    got, out, err = run(capsys, *argv)
    assert got == code
    assert err.startswith(prefix)


def test_parse_error_prefix(capsys, tmp_path):
    bad = tmp_path / "bad.graph"
    bad.write_text("vertex a\nedge a z\n")
    code, _, err = run(capsys, "encode", str(bad))
    assert code == 2 and err.startswith("parse:") and "line 2" in err
    formula = tmp_path / "bad.lis"
    formula.write_text("leq(x)")
    code, _, err = run(capsys, "eval", graph("point.graph"), "-f", str(formula))
    assert code == 2 and err.startswith("parse:")
