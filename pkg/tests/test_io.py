import json
import random

import pytest
from hypothesis import given, strategies as st

from hcblocks.acceptance import random_module, small_algebras
from hcblocks.algebra import upper_triangular_algebra
from hcblocks.blocks import ext_relation
from hcblocks.gwa import finite_glued_model
from hcblocks.io import (Document, DocumentError, Report, algebra_document, build, digest,
                         emit, pair_document, parse, module_document, relation_document,
                         words_document)

ALGEBRAS = small_algebras()


def _doc(kind, payload, version="hcb/1"):
    return json.dumps({"version": version, "kind": kind, "payload": payload})


KK = {"mult": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}


def test_parse_field_product():
    doc = parse(_doc("algebra", KK))
    assert doc.kind == "algebra"
    alg = build(doc)
    assert alg.dim == 2 and len(alg.cfs()) == 2


def test_zero_denominator_names_the_field():
    with pytest.raises(DocumentError) as err:
        parse(_doc("algebra", {"mult": [[["1/0", 0], [0, 0]], [[0, 0], [0, 1]]]}))
    assert err.value.path == "payload.mult[0][0][0]"


def test_wrong_row_count_has_a_path():
    with pytest.raises(DocumentError) as err:
        parse(_doc("algebra", {"mult": [[[1, 0], [0, 0]], [[0, 0]]]}))
    assert err.value.path == "payload.mult[1]"


@pytest.mark.parametrize("text,path", [
    (_doc("algebra", {"mult": [[[1]]], "extra": 1}), "payload"),
    (_doc("algebra", {"mult": [[["x"]]]}), "payload.mult[0][0][0]"),
    (_doc("bogus", {}), "kind"),
    (_doc("algebra", KK, version="hcb/0"), "version"),
    (_doc("module", {"algebra": KK, "side": "up", "dim": 1, "action": []}), "payload.side"),
])
def test_schema_errors(text, path):
    with pytest.raises(DocumentError) as err:
        parse(text)
    assert err.value.path == path


def test_syntax_and_encoding_errors():
    with pytest.raises(DocumentError, match="line 1"):
        parse("{oops")
    with pytest.raises(DocumentError, match="UTF-8"):
        parse(b"\xff\xfe")


def test_module_action_shape():
    payload = {"algebra": KK, "side": "left", "dim": 1, "action": [[[1]], [[0, 0]]]}
    with pytest.raises(DocumentError) as err:
        parse(_doc("module", payload))
    assert err.value.path == "payload.action[1][0]"


def test_axiom_violation_is_deferred_to_build():
    from hcblocks.algebra import AxiomError
    doc = parse(_doc("algebra", {"mult": KK["mult"], "unit": [1, 0]}))
    with pytest.raises(AxiomError):
        build(doc)


@given(st.sampled_from(sorted(ALGEBRAS)))
def test_algebra_round_trip(name):
    doc = algebra_document(ALGEBRAS[name])
    assert parse(emit(doc)) == doc
    rebuilt = build(parse(emit(doc)))
    assert rebuilt.dim == ALGEBRAS[name].dim
    assert algebra_document(rebuilt) == doc


@given(st.sampled_from(sorted(ALGEBRAS)), st.integers(0, 10**6))
def test_module_round_trip(name, seed):
    mod = random_module(ALGEBRAS[name], random.Random(seed))
    doc = module_document(mod)
    assert parse(emit(doc)) == doc
    back = build(doc)
    assert [m for m in back.matrices()] == [m for m in mod.matrices()]


def test_pair_relation_and_words_round_trip():
    fm = finite_glued_model(1)
    for doc in (pair_document(fm.gamma, fm.big, fm.embedding),
                relation_document(ext_relation(fm.gamma)),
                words_document([("m0",), ("m0", "m3")]),
                Document("command-config", parse(_doc("command-config", {"a": [1]})).payload)):
        assert parse(emit(doc)) == doc
    pp = build(pair_document(fm.gamma, fm.big, fm.embedding))
    assert pp.concrete


def test_digest_is_stable_and_sensitive():
    doc = algebra_document(upper_triangular_algebra(2))
    assert digest([doc], {"x": 1}) == digest([parse(emit(doc))], {"x": 1})
    assert digest([doc], {"x": 1}) != digest([doc], {"x": 2})


def test_report_json_is_deterministic():
    rep = Report("demo", "0" * 64, {"b": [1, 2], "a": "1/2"}, "table\n")
    assert rep.render_json() == rep.render_json()
    assert json.loads(rep.render_json())["version"] == "hcb/1"
