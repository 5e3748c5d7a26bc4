import json

import pytest
from click.testing import CliRunner

from hcblocks.algebra import upper_triangular_algebra
from hcblocks.cli import main, parse_word
from hcblocks.io import emit, module_document


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def ut2_module(tmp_path):
    path = tmp_path / "ut2.json"
    path.write_text(emit(module_document(upper_triangular_algebra(2).regular_module())))
    return str(path)


def run(runner, *args):
    return runner.invoke(main, list(args), catch_exceptions=False)


def test_parse_word():
    assert parse_word("U(0,0)^2*L(0,0)") == ("U(0,0)", "U(0,0)", "L(0,0)")
    assert parse_word("1") == ()


def test_blocks_on_upper_triangular(runner, ut2_module):
    res = run(runner, "blocks", ut2_module, "--relation", "ext", "--json")
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert out["results"]["residual_dim"] == 0
    assert [len(p["block"]) for p in out["results"]["pieces"]] == [2]


def test_blocks_with_equality_relation_fails(runner, ut2_module):
    res = run(runner, "blocks", ut2_module, "--relation", "equality")
    assert res.exit_code == 1


def test_example_gwa_then_support(runner, tmp_path):
    path = tmp_path / "gwa.json"
    res = run(runner, "example", "gwa", "--point", "0,0", "--order", "2", "--window", "3",
              "-o", str(path))
    assert res.exit_code == 0
    res = run(runner, "support", str(path), "--json")
    out = json.loads(res.output)["results"]
    assert out["count"] == 7
    assert {p["dim"] for p in out["support"]} == {3}


def test_reports_are_byte_identical(runner, ut2_module):
    a = run(runner, "simples", ut2_module, "--json").output
    b = run(runner, "simples", ut2_module, "--json").output
    assert a == b


def test_input_errors_exit_2(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": "hcb/1", "kind": "algebra", "payload": {"mult": [[["1/0"]]]}}')
    res = runner.invoke(main, ["simples", str(bad)])
    assert res.exit_code == 2
    assert "payload.mult[0][0][0]" in res.output
    assert runner.invoke(main, ["simples", str(tmp_path / "missing.json")]).exit_code == 2
    assert runner.invoke(main, ["verify-hc"]).exit_code == 2


def test_axiom_violation_exits_1(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"version": "hcb/1", "kind": "algebra", "payload": {
        "mult": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]], "unit": [1, 0]}}))
    assert runner.invoke(main, ["simples", str(bad)]).exit_code == 1


def test_dimension_guard(runner, ut2_module, monkeypatch):
    monkeypatch.setenv("HCB_MAX_DIM", "2")
    res = runner.invoke(main, ["blocks", ut2_module])
    assert res.exit_code == 2
    assert "HCB_MAX_DIM" in res.output


def test_finite_pair_commands(runner, tmp_path):
    pair = tmp_path / "pair.json"
    assert run(runner, "example", "glued", "--finite", "--order", "1", "-o", str(pair)).exit_code == 0
    res = run(runner, "verify-hc", str(pair), "--json")
    assert json.loads(res.output)["results"]["verdict"] == "strong_hc"
    res = run(runner, "components", str(pair), "--kind", "delta", "--json")
    assert len(json.loads(res.output)["results"]["components"]) == 1
    res = run(runner, "preorder", str(pair), "--dot")
    assert res.output.startswith("digraph")
    mod = tmp_path / "reg.json"
    from hcblocks.io import build, parse
    pp = build(parse(pair.read_text()))
    mod.write_text(emit(module_document(pp.family.big.regular_module())))
    res = run(runner, "decompose", str(mod), "--pair", str(pair), "--json")
    assert res.exit_code == 0


def test_stage_commands(runner):
    res = run(runner, "cat-compose", "--builtin", "glued", "--source", "U(0,0)",
              "--middle", "U(0,0)*L(0,0)", "--target", "U(0,0)*L(0,0)", "--json")
    assert res.exit_code == 0
    assert json.loads(res.output)["results"]["composite"]["stage"] == [["U(0,0)"],
                                                                         ["U(0,0)", "L(0,0)"]]
    res = run(runner, "cat-assoc-check", "--builtin", "glued", "--trials", "3")
    assert res.exit_code == 0
    res = run(runner, "cyclicity", "--builtin", "gwa", "--block", "(0,0)", "--window", "2")
    assert res.exit_code == 0


def test_completion_commands(runner, tmp_path):
    alg = tmp_path / "glued.json"
    assert run(runner, "example", "glued", "--order", "4", "--window", "0",
               "-o", str(alg)).exit_code == 0
    res = run(runner, "completion", str(alg), "--word", "U(0,0)*L(0,0)", "--json")
    out = json.loads(res.output)["results"]
    assert (out["stage_dim"], out["semisimple_dim"]) == (3, 2)
    assert run(runner, "badic-check", str(alg), "--block", "U(0,0)").exit_code == 0
    poly = tmp_path / "poly.json"
    run(runner, "example", "poly", "--order", "3", "-o", str(poly))
    res = run(runner, "ext-quiver", str(poly), "--json")
    assert json.loads(res.output)["results"]["edges"][0]["dim"] == 1
    assert run(runner, "fitting", str(poly), "--block", "m0").exit_code == 2
