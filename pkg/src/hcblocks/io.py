"""JSON documents, schema validation and versioned reports.

Every document is an object ``{"version": "hcb/1", "kind": ..., "payload": ...}``.
Rationals are JSON integers or strings ``"p"`` / ``"p/q"``; after parsing they are
held as canonical strings so that ``parse(emit(doc)) == doc``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import jsonschema

from .algebra import Algebra, Module, build_algebra
from .blocks import Relation, user_relation
from .hc import ConcreteFamily, PairPresentation
from .linalg import LinalgError, Matrix, Subspace, format_rational, parse_rational

VERSION = "hcb/1"
KINDS = ("algebra", "module", "pair", "relation", "words", "command-config")


class DocumentError(ValueError):
    """Malformed input; ``path`` locates the offending field."""

    exit_code = 2

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


# ---------------------------------------------------------------- schemas

_RATIONAL = {"oneOf": [{"type": "integer"},
                       {"type": "string", "pattern": r"^\s*-?\d+\s*(/\s*\d+\s*)?$"}]}
_VECTOR = {"type": "array", "items": _RATIONAL}
_MATRIX = {"type": "array", "items": _VECTOR}
_LABEL = {"type": "string", "minLength": 1}

_ALGEBRA = {
    "type": "object",
    "required": ["mult"],
    "additionalProperties": False,
    "properties": {
        "names": {"type": "array", "items": {"type": "string"}},
        "mult": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _VECTOR}},
        "unit": _VECTOR,
        "labels": {"type": "object", "additionalProperties": _MATRIX},
    },
}

_MODULE = {
    "type": "object",
    "required": ["algebra", "side", "dim", "action"],
    "additionalProperties": False,
    "properties": {
        "algebra": _ALGEBRA,
        "side": {"enum": ["left", "right"]},
        "dim": {"type": "integer", "minimum": 0},
        "action": {"type": "array", "items": _MATRIX},
    },
}

_PAIR = {
    "type": "object",
    "required": ["gamma", "big", "embedding"],
    "additionalProperties": False,
    "properties": {"gamma": _ALGEBRA, "big": _ALGEBRA, "embedding": _MATRIX},
}

_WORDS = {"type": "array", "items": {"type": "array", "items": _LABEL}}

SCHEMAS = {
    "algebra": _ALGEBRA,
    "module": _MODULE,
    "pair": _PAIR,
    "relation": {"type": "object", "required": ["classes"], "additionalProperties": False,
                 "properties": {"classes": _WORDS}},
    "words": {"type": "object", "required": ["words"], "additionalProperties": False,
              "properties": {"words": _WORDS}},
    "command-config": {"type": "object"},
}

ENVELOPE = {
    "type": "object",
    "required": ["version", "kind", "payload"],
    "additionalProperties": False,
    "properties": {"version": {"type": "string"}, "kind": {"enum": list(KINDS)},
                   "payload": {}},
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["version", "command", "inputs_digest", "status", "results"],
    "properties": {
        "version": {"const": VERSION},
        "command": {"type": "string"},
        "inputs_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "status": {"enum": [0, 1, 2]},
        "results": {},
    },
}


# ---------------------------------------------------------------- documents

@dataclass(frozen=True)
class Document:
    kind: str
    payload: Any
    version: str = VERSION

    def to_json(self) -> dict:
        return {"version": self.version, "kind": self.kind, "payload": self.payload}


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def _validate(instance, schema, prefix) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise DocumentError(err.message, _path(prefix + list(err.absolute_path)))


def _canon(x, path: str) -> str:
    try:
        return format_rational(x if isinstance(x, int) else parse_rational(x))
    except LinalgError as exc:
        raise DocumentError(str(exc), path) from None


def _canon_vector(v, path):
    return [_canon(a, f"{path}[{i}]") for i, a in enumerate(v)]


def _canon_matrix(m, path, shape=None):
    if shape is not None and len(m) != shape[0]:
        raise DocumentError(f"expected {shape[0]} rows, got {len(m)}", path)
    out = []
    for i, row in enumerate(m):
        if shape is not None and len(row) != shape[1]:
            raise DocumentError(f"expected {shape[1]} entries, got {len(row)}", f"{path}[{i}]")
        out.append(_canon_vector(row, f"{path}[{i}]"))
    return out


def _canon_algebra(p: dict, path: str) -> dict:
    mult = p["mult"]
    n = len(mult)
    table = []
    for i, row in enumerate(mult):
        if len(row) != n:
            raise DocumentError(f"expected {n} rows of products, got {len(row)}",
                                f"{path}.mult[{i}]")
        table.append(_canon_matrix(row, f"{path}.mult[{i}]", (n, n)))
    out = {"mult": table}
    if "names" in p:
        if len(p["names"]) != n:
            raise DocumentError(f"expected {n} names, got {len(p['names'])}", f"{path}.names")
        out["names"] = list(p["names"])
    if "unit" in p:
        if len(p["unit"]) != n:
            raise DocumentError(f"expected length {n}", f"{path}.unit")
        out["unit"] = _canon_vector(p["unit"], f"{path}.unit")
    if "labels" in p:
        labels = {}
        for name, vecs in sorted(p["labels"].items()):
            labels[name] = [_canon_vector(v, f"{path}.labels.{name}[{k}]")
                            for k, v in enumerate(vecs)]
            for k, v in enumerate(vecs):
                if len(v) != n:
                    raise DocumentError(f"expected length {n}", f"{path}.labels.{name}[{k}]")
        out["labels"] = labels
    return out


def _canon_payload(kind: str, p: Any) -> Any:
    if kind == "algebra":
        return _canon_algebra(p, "payload")
    if kind == "module":
        alg = _canon_algebra(p["algebra"], "payload.algebra")
        n, d = len(alg["mult"]), p["dim"]
        if len(p["action"]) != n:
            raise DocumentError(f"expected {n} action matrices, got {len(p['action'])}",
                                "payload.action")
        action = [_canon_matrix(m, f"payload.action[{i}]", (d, d))
                  for i, m in enumerate(p["action"])]
        return {"algebra": alg, "side": p["side"], "dim": d, "action": action}
    if kind == "pair":
        gamma = _canon_algebra(p["gamma"], "payload.gamma")
        big = _canon_algebra(p["big"], "payload.big")
        emb = _canon_matrix(p["embedding"], "payload.embedding",
                            (len(big["mult"]), len(gamma["mult"])))
        return {"gamma": gamma, "big": big, "embedding": emb}
    return json.loads(json.dumps(p))


def parse(text: str | bytes) -> Document:
    """Parse and validate a document; raises :class:`DocumentError` with a field path."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentError(f"input is not UTF-8: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"JSON syntax error at line {exc.lineno} column {exc.colno}: "
                            f"{exc.msg}") from None
    _validate(raw, ENVELOPE, [])
    if raw["version"] != VERSION:
        raise DocumentError(f"unrecognized version {raw['version']!r}", "version")
    kind = raw["kind"]
    _validate(raw["payload"], SCHEMAS[kind], ["payload"])
    return Document(kind, _freeze(_canon_payload(kind, raw["payload"])))


def emit(doc: Document) -> str:
    return canonical_json(doc.to_json())


def canonical_json(obj, indent: int | None = None) -> str:
    seps = (",", ":") if indent is None else (",", ": ")
    return json.dumps(_thaw(obj), sort_keys=True, ensure_ascii=False, indent=indent,
                      separators=seps) + "\n"


class _FrozenDict(dict):
    """A hashable dict so that documents compare and hash by value."""

    def __hash__(self):
        return hash(tuple(sorted(self.items())))


def _freeze(x):
    if isinstance(x, dict):
        return _FrozenDict({k: _freeze(v) for k, v in x.items()})
    if isinstance(x, list):
        return tuple(_freeze(v) for v in x)
    return x


def _thaw(x):
    if isinstance(x, dict):
        return {k: _thaw(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_thaw(v) for v in x]
    return x


# ---------------------------------------------------------------- builders

def _frac(v) -> list[Fraction]:
    return [parse_rational(a) for a in v]


def build_algebra_payload(p, check: bool = True) -> Algebra:
    n = len(p["mult"])
    mult = [[_frac(vec) for vec in row] for row in p["mult"]]
    labels = {name: Subspace.span([_frac(v) for v in vecs], n)
              for name, vecs in p.get("labels", {}).items()}
    return build_algebra(mult, _frac(p["unit"]) if "unit" in p else None,
                         p.get("names"), check=check, labels=labels)


def build(doc: Document, check: bool = True):
    """Turn a parsed document into a library object."""
    p = doc.payload
    if doc.kind == "algebra":
        return build_algebra_payload(p, check)
    if doc.kind == "module":
        alg = build_algebra_payload(p["algebra"], check)
        mats = [Matrix([_frac(r) for r in m], p["dim"]) for m in p["action"]]
        return Module(alg, p["side"], p["dim"], mats, check=check)
    if doc.kind == "pair":
        gamma = build_algebra_payload(p["gamma"], check)
        big = build_algebra_payload(p["big"], check)
        emb = Matrix([_frac(r) for r in p["embedding"]], gamma.dim)
        return PairPresentation(gamma, ConcreteFamily(big, gamma, emb, check=check))
    if doc.kind == "relation":
        return [tuple(c) for c in p["classes"]]
    if doc.kind == "words":
        return [tuple(w) for w in p["words"]]
    return _thaw(p)


def relation_from(doc: Document, alg: Algebra) -> Relation:
    return user_relation(alg, build(doc))


# ---------------------------------------------------------------- emitters

def _vec(v) -> list[str]:
    return [format_rational(a) for a in v]


def _mat(m: Matrix) -> list[list[str]]:
    return [_vec(r) for r in m.rows]


def algebra_payload(alg: Algebra) -> dict:
    n = alg.dim
    out = {
        "names": list(alg.names),
        "mult": [[_vec(alg.basis_product(i, j)) for j in range(n)] for i in range(n)],
        "unit": _vec(alg.unit),
    }
    if alg.labels:
        out["labels"] = {k: [_vec(b) for b in sp.basis] for k, sp in sorted(alg.labels.items())}
    return out


def algebra_document(alg: Algebra) -> Document:
    return Document("algebra", _freeze(algebra_payload(alg)))


def module_document(mod: Module) -> Document:
    return Document("module", _freeze({
        "algebra": algebra_payload(mod.algebra), "side": mod.side, "dim": mod.dim,
        "action": [_mat(m) for m in mod.matrices()]}))


def pair_document(gamma: Algebra, big: Algebra, embedding: Matrix) -> Document:
    return Document("pair", _freeze({
        "gamma": algebra_payload(gamma), "big": algebra_payload(big),
        "embedding": _mat(embedding)}))


def relation_document(rel: Relation) -> Document:
    return Document("relation", _freeze({"classes": [list(c) for c in rel.classes]}))


def words_document(words) -> Document:
    return Document("words", _freeze({"words": [list(w) for w in words]}))


# ---------------------------------------------------------------- reports

def digest(documents, flags: dict) -> str:
    """SHA-256 of the canonical form of all inputs and flags."""
    body = {"documents": [d.to_json() for d in documents], "flags": flags}
    return hashlib.sha256(canonical_json(body).encode("utf-8")).hexdigest()


def jsonable(x):
    """Recursively convert library values to JSON (rationals as ``p/q`` strings)."""
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else "|".join(map(str, k)): jsonable(v)
                for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x, key=repr) if isinstance(x, (set, frozenset)) else x
        return [jsonable(v) for v in items]
    if isinstance(x, Matrix):
        return _mat(x)
    if isinstance(x, Subspace):
        return [_vec(b) for b in x.basis]
    return x


@dataclass
class Report:
    command: str
    inputs_digest: str
    results: Any
    table: str
    status: int = 0
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"version": VERSION, "command": self.command,
               "inputs_digest": self.inputs_digest, "status": self.status,
               "results": jsonable(self.results)}
        out.update(jsonable(self.extra))
        jsonschema.validate(out, REPORT_SCHEMA)
        return out

    def render_json(self) -> str:
        return canonical_json(self.to_json(), indent=2)


def format_table(headers: list[str], rows: list[list]) -> str:
    cells = [[str(jsonable(c)) if not isinstance(c, str) else c for c in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    out = [line.rstrip(), "  ".join("-" * w for w in widths)]
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(out) + "\n"
