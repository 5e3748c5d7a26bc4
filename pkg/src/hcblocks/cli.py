"""The ``hcb`` command line.

Exit status 0 means success, 1 a failed verification (the report carries a
witness) and 2 an input error.
"""

from __future__ import annotations

import functools
import random
import sys
from fractions import Fraction

import click

from . import acceptance
from .algebra import (AlgebraError, AxiomError, Module, NonSplitError,
                      truncated_polynomial_algebra)
from .blocks import (BlockError, block_decompose, equality_relation, ext_quiver,
                     ext_relation, fitting_split)
from .gwa import (WindowError, GluedGamma, as_point, finite_glued_model, glued_pair,
                  gwa_family_window, gwa_quotient)
from .hc import (ConcreteFamily, InvarianceError, PairPresentation, PresentationError,
                 build_preorder, decompose_hc_module, containment_witnesses,
                 verify_hc_subalgebra)
from .io import (Document, DocumentError, Report, algebra_document, build, digest, emit,
                 format_table, module_document, pair_document, parse, relation_from)
from .linalg import DimensionGuardError, LinalgError, parse_rational
from .stages import (StageError, StageElement, badic_stage_check, block_words,
                     completion_stage, compose, cyclicity_check, double_quotient,
                     quasiregular_check, radical_stage, random_stage_element,
                     semisimple_stage_check)

INPUT_ERRORS = (DocumentError, LinalgError, BlockError, PresentationError, StageError,
                WindowError, DimensionGuardError, NonSplitError, KeyError)


class InputError(click.ClickException):
    exit_code = 2


class VerificationError(click.ClickException):
    exit_code = 1


# ---------------------------------------------------------------- parsing helpers

def parse_word(text: str) -> tuple[str, ...]:
    """``"U(0,0)^2*L(0,0)"`` becomes ``("U(0,0)", "U(0,0)", "L(0,0)")``; ``"1"`` is empty."""
    text = text.strip()
    if text in ("", "1"):
        return ()
    out: list[str] = []
    for factor in text.split("*"):
        label, caret, power = factor.strip().partition("^")
        if not label:
            raise InputError(f"empty factor in word {text!r}")
        try:
            k = int(power) if caret else 1
        except ValueError:
            raise InputError(f"bad exponent in word {text!r}") from None
        if k < 0:
            raise InputError(f"negative exponent in word {text!r}")
        out += [label] * k
    return tuple(out)


def format_word(word) -> str:
    return "*".join(word) if word else "1"


def parse_vector(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(parse_rational(a) for a in text.split(","))
    except LinalgError as exc:
        raise InputError(f"bad vector {text!r}: {exc}") from None


def parse_point(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"a point is two rationals 'a,b', got {text!r}")
    try:
        return as_point(tuple(parse_rational(p) for p in parts))
    except LinalgError as exc:
        raise InputError(f"bad point {text!r}: {exc}") from None


def load(path: str) -> Document:
    try:
        with click.open_file(path, "rb") as stream:
            text = stream.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse(text)


def algebra_of(doc: Document):
    obj = build(doc)
    if doc.kind == "algebra":
        return obj
    if doc.kind == "module":
        return obj.algebra
    if doc.kind == "pair":
        return obj.gamma
    raise InputError(f"expected an algebra, module or pair document, got {doc.kind}")


def module_of(doc: Document) -> Module:
    if doc.kind != "module":
        raise InputError(f"expected a module document, got {doc.kind}")
    return build(doc)


def relation_for(alg, choice: str):
    if choice == "ext":
        return ext_relation(alg)
    if choice == "equality":
        return equality_relation(alg)
    doc = load(choice)
    if doc.kind != "relation":
        raise InputError(f"{choice}: expected a relation document, got {doc.kind}")
    return relation_from(doc, alg)


# ---------------------------------------------------------------- output

def emit_report(report: Report, as_json: bool, output: str | None) -> None:
    text = report.render_json() if as_json else report.table
    with click.open_file(output or "-", "w") as fh:
        fh.write(text)
    if report.status:
        sys.exit(report.status)


def output_options(fn):
    @click.option("--json", "as_json", is_flag=True, help="Print the JSON report.")
    @click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                  help="Write to a file instead of standard output.")
    @functools.wraps(fn)
    def wrapper(*args, as_json, output, **kwargs):
        emit_report(fn(*args, **kwargs), as_json, output)
    return wrapper


def relation_option(fn):
    return click.option("--relation", "relation", default="ext", show_default=True,
                        help="ext, equality, or a relation document.")(fn)


def pair_options(fn):
    """A pair comes from a document or from one of the built-in examples."""
    @click.argument("pair_file", required=False)
    @click.option("--builtin", type=click.Choice(["glued", "gwa", "finite"]), default=None,
                  help="Use a built-in pair instead of a document.")
    @click.option("--point", default="0,0", show_default=True, help="GWA point 'a,b'.")
    @click.option("--order", type=int, default=3, show_default=True,
                  help="Truncation order.")
    @click.option("--window", type=int, default=1, show_default=True,
                  help="Lines kept on each side of the point.")
    @functools.wraps(fn)
    def wrapper(*args, pair_file, builtin, point, order, window, **kwargs):
        flags = {"builtin": builtin, "point": point, "order": order, "window": window}
        if (pair_file is None) == (builtin is None):
            raise InputError("give exactly one of a pair document or --builtin")
        if builtin is None:
            doc = load(pair_file)
            if doc.kind != "pair":
                raise InputError(f"{pair_file}: expected a pair document, got {doc.kind}")
            pp, docs = build(doc), [doc]
        else:
            pp, docs = builtin_pair(builtin, parse_point(point), order, window), []
        return fn(*args, pp=pp, docs=docs, flags=flags, **kwargs)
    return wrapper


def builtin_pair(name: str, point, order: int, window: int) -> PairPresentation:
    if name == "glued":
        return glued_pair(window, order)
    if name == "gwa":
        fam = gwa_family_window(point, order, window)
        return PairPresentation(fam.gamma, fam)
    fm = finite_glued_model(order, window)
    return PairPresentation(fm.gamma, ConcreteFamily(fm.big, fm.gamma, fm.embedding))


def _status(ok: bool) -> int:
    return 0 if ok else 1


# ---------------------------------------------------------------- group

class HcbGroup(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (AxiomError, InvarianceError) as exc:
            witness = getattr(exc, "witness", None)
            raise VerificationError(f"{exc} (witness: {witness})") from None
        except INPUT_ERRORS as exc:
            raise InputError(str(exc)) from None
        except AlgebraError as exc:
            raise InputError(str(exc)) from None


@click.group(cls=HcbGroup, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="hcblocks")
def main():
    """Exact block theory for finite-dimensional algebras and truncated pairs."""


# ---------------------------------------------------------------- finite algebras

@main.command()
@click.argument("document")
@output_options
def simples(document):
    """Maximal ideals of finite codimension and their simple modules."""
    doc = load(document)
    alg = algebra_of(doc)
    rows = [[m.label, m.codim, m.simple.dim] for m in alg.cfs()]
    results = [{"label": l, "codim": c, "simple_dim": d} for l, c, d in rows]
    return Report("simples", digest([doc], {}), results,
                  format_table(["ideal", "codim", "simple dim"], rows))


@main.command("ext-quiver")
@click.argument("document")
@output_options
def ext_quiver_cmd(document):
    """Dimensions of Ext^1 between simple modules."""
    doc = load(document)
    q = ext_quiver(algebra_of(doc))
    rows = [[s] + [q.edge_dims[(s, t)] for t in q.vertices] for s in q.vertices]
    results = {"vertices": list(q.vertices),
               "edges": [{"source": s, "target": t, "dim": d} for s, t, d in q.edges()]}
    return Report("ext-quiver", digest([doc], {}), results,
                  format_table(["Ext^1(S, T)"] + list(q.vertices), rows))


def _block_rows(part, with_basis: bool):
    rows, results = [], []
    for cls, sp in part.pieces.items():
        if sp.dim == 0:
            continue
        rows.append(["|".join(cls), sp.dim])
        entry = {"block": list(cls), "dim": sp.dim}
        if with_basis:
            entry["basis"] = sp
        results.append(entry)
    return rows, results


@main.command()
@click.argument("document")
@relation_option
@output_options
def blocks(document, relation):
    """Block decomposition of a module."""
    doc = load(document)
    mod = module_of(doc)
    part = block_decompose(mod, relation_for(mod.algebra, relation))
    rows, pieces = _block_rows(part, False)
    ok = part.is_total()
    results = {"classes": [list(c) for c in relation_for(mod.algebra, relation).classes],
               "pieces": pieces, "residual_dim": part.residual.dim, "total": ok}
    if not ok:
        results["witness"] = part.residual
    table = format_table(["block", "dim"], rows) + f"residual: {part.residual.dim}\n"
    return Report("blocks", digest([doc], {"relation": relation}), results, table,
                  _status(ok))


@main.command()
@click.argument("document")
@click.option("--pair", "pair_file", default=None,
              help="Group pieces by Delta-class of this pair (the module is over its big algebra).")
@relation_option
@output_options
def decompose(document, pair_file, relation):
    """Block pieces of a module with bases, or its HC decomposition over a pair."""
    doc = load(document)
    mod = module_of(doc)
    flags = {"relation": relation, "pair": pair_file is not None}
    if pair_file is None:
        part = block_decompose(mod, relation_for(mod.algebra, relation))
        rows, pieces = _block_rows(part, True)
        ok = part.is_total()
        results = {"pieces": pieces, "residual_dim": part.residual.dim, "total": ok}
        return Report("decompose", digest([doc], flags), results,
                      format_table(["block", "dim"], rows), _status(ok))
    pdoc = load(pair_file)
    pp = build(pdoc)
    rel = relation_for(pp.gamma, relation)
    pre = build_preorder(pp, rel)
    dec = decompose_hc_module(pp, mod, rel, pre)
    bad = containment_witnesses(pp, mod, rel, pre)
    rows = [[" ".join("|".join(b) for b in delta), sp.dim] for delta, sp in dec.summands]
    results = {"summands": [{"delta_class": [list(b) for b in delta], "dim": sp.dim,
                             "basis": sp} for delta, sp in dec.summands],
               "containment_failures": [[list(b), name, list(c)] for b, name, c in bad]}
    return Report("decompose", digest([doc, pdoc], flags), results,
                  format_table(["delta class", "dim"], rows), _status(not bad))


@main.command()
@click.argument("document")
@relation_option
@output_options
def support(document, relation):
    """Classes meeting a module, with the dimension of each block space."""
    doc = load(document)
    mod = module_of(doc)
    part = block_decompose(mod, relation_for(mod.algebra, relation))
    rows, pieces = _block_rows(part, False)
    results = {"support": pieces, "count": len(pieces)}
    return Report("support", digest([doc], {"relation": relation}), results,
                  format_table(["block", "dim"], rows) + f"{len(pieces)} classes\n")


@main.command()
@click.argument("document")
@click.option("--block", "label", required=True, help="Any ideal label of the block.")
@relation_option
@output_options
def fitting(document, label, relation):
    """Fitting split of a module along one block."""
    doc = load(document)
    mod = module_of(doc)
    rel = relation_for(mod.algebra, relation)
    fs = fitting_split(mod, rel.class_of(label), rel)
    results = {"block": list(fs.block), "block_dim": fs.block_space.dim,
               "complement_dim": fs.complement.dim, "annihilating_word": list(fs.word),
               "block_space": fs.block_space, "complement": fs.complement}
    table = format_table(["block", "V(B)", "complement", "word"],
                         [["|".join(fs.block), fs.block_space.dim, fs.complement.dim,
                           format_word(fs.word)]])
    return Report("fitting", digest([doc], {"block": label, "relation": relation}),
                  results, table)


# ---------------------------------------------------------------- pairs

def _default_words(rel, max_len: int, max_exp: int | None):
    return [w for cls in rel.classes for w in block_words(rel, cls, max_len, max_exp)]


@main.command("verify-hc")
@pair_options
@click.option("--word", "words", multiple=True, help="Ideal word such as 'a^2*b'; repeatable.")
@click.option("--max-len", type=int, default=1, show_default=True,
              help="Without --word, check all block words up to this length.")
@relation_option
@output_options
def verify_hc(pp, docs, flags, words, max_len, relation):
    """Decide whether Gamma is an HC block subalgebra on the given words."""
    rel = relation_for(pp.gamma, relation)
    ws = [parse_word(w) for w in words] or _default_words(rel, max_len, flags["order"])
    rep = verify_hc_subalgebra(pp, rel, ws)
    rows = [[format_word(c.word), c.side, c.residual_dim, c.strong, c.defect or ""]
            for c in rep.checks]
    table = format_table(["word", "side", "residual", "strong", "defect"], rows)
    table += f"verdict: {rep.verdict}\n"
    flags = dict(flags, words=[list(w) for w in ws], relation=relation)
    return Report("verify-hc", digest(docs, flags), rep.to_json(), table,
                  _status(rep.verdict != "fail"))


@main.command()
@pair_options
@click.option("--dot", is_flag=True, help="Print the preorder graph in DOT.")
@relation_option
@output_options
def preorder(pp, docs, flags, dot, relation):
    """The support preorder on blocks."""
    pre = build_preorder(pp, relation_for(pp.gamma, relation))
    edges = [{"source": list(b), "target": list(c), "word": list(w)}
             for (b, c), w in sorted(pre.edges.items())]
    rows = [["|".join(b), "|".join(c), format_word(w)] for (b, c), w in sorted(pre.edges.items())]
    table = pre.to_dot() + "\n" if dot else format_table(["from", "to", "word"], rows)
    results = {"nodes": [list(b) for b in pre.nodes], "edges": edges, "dot": pre.to_dot()}
    return Report("preorder", digest(docs, dict(flags, relation=relation)), results, table)


@main.command()
@pair_options
@click.option("--kind", type=click.Choice(["delta", "nabla"]), default="delta",
              show_default=True, help="Weakly (delta) or strongly (nabla) connected.")
@relation_option
@output_options
def components(pp, docs, flags, kind, relation):
    """Connected components of the support preorder."""
    pre = build_preorder(pp, relation_for(pp.gamma, relation))
    comps = pre.delta() if kind == "delta" else pre.nabla()
    rows = [[k, " ".join("|".join(b) for b in comp)] for k, comp in enumerate(comps)]
    results = {"kind": kind, "components": [[list(b) for b in comp] for comp in comps]}
    return Report("components", digest(docs, dict(flags, kind=kind, relation=relation)),
                  results, format_table(["#", "blocks"], rows))


def _element(dq, text: str | None, rng: random.Random) -> StageElement:
    if text is None:
        return random_stage_element(dq, rng)
    vec = parse_vector(text)
    if len(vec) != dq.dim:
        raise InputError(f"stage {dq.key()} has dimension {dq.dim}, got a vector of "
                         f"length {len(vec)}")
    return StageElement(dq, vec)


@main.command("cat-compose")
@pair_options
@click.option("--source", required=True, help="Word of the source block.")
@click.option("--middle", required=True, help="Word of the middle block.")
@click.option("--target", required=True, help="Word of the target block.")
@click.option("--alpha", default=None, help="Coordinates of alpha at (source, middle).")
@click.option("--beta", default=None, help="Coordinates of beta at (middle, target).")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for elements not given.")
@output_options
def cat_compose(pp, docs, flags, source, middle, target, alpha, beta, seed):
    """Compose two stage elements."""
    rel = ext_relation(pp.gamma)
    m, n, l = parse_word(source), parse_word(middle), parse_word(target)
    rng = random.Random(seed)
    a = _element(double_quotient(pp, m, n), alpha, rng)
    b = _element(double_quotient(pp, n, l), beta, rng)
    c = compose(b, a, rel)
    results = {"alpha": {"stage": [list(m), list(n)], "vector": a.vec},
               "beta": {"stage": [list(n), list(l)], "vector": b.vec},
               "composite": {"stage": [list(m), list(l)], "vector": c.vec}}
    rows = [["alpha", f"({format_word(m)}, {format_word(n)})", ",".join(map(str, a.vec))],
            ["beta", f"({format_word(n)}, {format_word(l)})", ",".join(map(str, b.vec))],
            ["composite", f"({format_word(m)}, {format_word(l)})",
             ",".join(map(str, c.vec))]]
    flags = dict(flags, source=source, middle=middle, target=target, alpha=alpha,
                 beta=beta, seed=seed)
    return Report("cat-compose", digest(docs, flags), results,
                  format_table(["element", "stage", "coordinates"], rows))


@main.command("cat-assoc-check")
@pair_options
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-len", type=int, default=2, show_default=True,
              help="Longest source and target words.")
@output_options
def cat_assoc_check(pp, docs, flags, trials, seed, max_len):
    """Unit, Gamma-action, independence and associativity laws on random triples."""
    rel = ext_relation(pp.gamma)
    done, counts, failures = acceptance.stage_law_trials(
        pp, rel, trials, random.Random(seed), max_len, flags["order"])
    ok = not failures and done >= trials
    rows = [[law, n] for law, n in counts.items()]
    table = format_table(["law", "checks"], rows) + \
        f"{done} triples, {len(failures)} failures\n"
    results = {"triples": done, "counts": counts,
               "failures": [[name, list(m), list(n), list(l), list(k), detail]
                            for name, m, n, l, k, detail in failures]}
    flags = dict(flags, trials=trials, seed=seed, max_len=max_len)
    return Report("cat-assoc-check", digest(docs, flags), results, table, _status(ok))


@main.command()
@pair_options
@click.option("--block", "label", required=True, help="Any ideal label of the block.")
@click.option("--max-len", type=int, default=2, show_default=True)
@output_options
def cyclicity(pp, docs, flags, label, max_len):
    """Check that every stage of A(B,B) is cyclic on the unit coset."""
    rel = ext_relation(pp.gamma)
    ws = block_words(rel, rel.class_of(label), max_len, flags["order"])
    stages = []
    for a in ws:
        for b in ws:
            try:
                stages.append(double_quotient(pp, a, b))
            except WindowError:
                continue
    res = cyclicity_check(stages)
    ok = all(r.left and r.right for r in res)
    rows = [[format_word(r.stage[0]), format_word(r.stage[1]), r.dim, r.left, r.right]
            for r in res]
    results = [{"source": list(r.stage[0]), "target": list(r.stage[1]), "dim": r.dim,
                "left": r.left, "right": r.right, "witness": r.witness} for r in res]
    return Report("cyclicity", digest(docs, dict(flags, block=label, max_len=max_len)),
                  results, format_table(["source", "target", "dim", "left", "right"], rows),
                  _status(ok))


# ---------------------------------------------------------------- completions

@main.command()
@click.argument("document")
@click.option("--word", required=True, help="Ideal word of one block, e.g. 'a*b'.")
@relation_option
@output_options
def completion(document, word, relation):
    """Radical and semisimple quotient of one completion stage."""
    doc = load(document)
    alg = algebra_of(doc)
    st = completion_stage(alg, relation_for(alg, relation), parse_word(word))
    rad = radical_stage(st)
    ss = semisimple_stage_check(st)
    qr = quasiregular_check(st)
    ok = rad.agree and ss.ok and qr
    results = {"word": list(st.word), "block": list(st.block), "stage_dim": ss.stage_dim,
               "radical_dim": rad.trace.dim, "radical_agree": rad.agree,
               "semisimple_dim": ss.semisimple_dim, "expected_semisimple_dim": ss.expected_dim,
               "simple_count": ss.simple_count, "quasiregular": qr}
    rows = [[k, v] for k, v in results.items() if k not in ("word", "block")]
    return Report("completion", digest([doc], {"word": word, "relation": relation}),
                  results, format_table(["quantity", "value"], rows), _status(ok))


@main.command("badic-check")
@click.argument("document")
@click.option("--block", "label", required=True, help="Any ideal label of the block.")
@click.option("--level", type=int, default=1, show_default=True)
@relation_option
@output_options
def badic_check(document, label, level, relation):
    """Compare powers of the block product with powers of the block intersection."""
    doc = load(document)
    alg = algebra_of(doc)
    rel = relation_for(alg, relation)
    res = badic_stage_check(alg, rel, rel.class_of(label), level)
    results = {"block": list(res.block), "level": level, "product_dim": res.product_dim,
               "intersection_dim": res.intersection_dim, "deep_dim": res.deep_dim,
               "forward_contained": res.forward_contained,
               "backward_contained": res.backward_contained,
               "composites_ok": res.composites_ok}
    rows = [[k, v] for k, v in results.items() if k != "block"]
    flags = {"block": label, "level": level, "relation": relation}
    return Report("badic-check", digest([doc], flags), results,
                  format_table(["quantity", "value"], rows), _status(res.ok))


# ---------------------------------------------------------------- generators

@main.group()
def example():
    """Emit example documents."""


def _write_document(doc: Document, output: str | None) -> None:
    with click.open_file(output or "-", "w") as fh:
        fh.write(emit(doc))


@example.command("gwa")
@click.option("--point", default="0,0", show_default=True, help="Point 'a,b' of the weight.")
@click.option("--order", type=int, default=2, show_default=True,
              help="Power of the maximal ideal.")
@click.option("--window", type=int, default=2, show_default=True,
              help="Lines kept on each side.")
@click.option("--side", type=click.Choice(["left", "right"]), default="left",
              show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def example_gwa(point, order, window, side, output):
    """The weight module A0/A0 m^order restricted to the truncated Gamma0."""
    mod = gwa_quotient(parse_point(point), order, window, side)
    _write_document(module_document(mod.quotient.module), output)


@example.command("glued")
@click.option("--order", type=int, default=2, show_default=True, help="Local order.")
@click.option("--window", type=int, default=1, show_default=True,
              help="Points (2j, 0) with |j| <= window.")
@click.option("--point", "extra", multiple=True, help="Extra point 'a,b'; repeatable.")
@click.option("--finite", is_flag=True,
              help="Emit the finite matrix model as a pair instead of the algebra.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def example_glued(order, window, extra, finite, output):
    """The truncated glued algebra, or its finite matrix model as a pair."""
    if finite:
        fm = finite_glued_model(order, window)
        _write_document(pair_document(fm.gamma, fm.big, fm.embedding), output)
        return
    pts = [(2 * j, 0) for j in range(-window, window + 1)]
    pts += [p for p in map(parse_point, extra) if p not in pts]
    _write_document(algebra_document(GluedGamma(pts, order).algebra()), output)


@example.command("poly")
@click.option("--order", type=int, default=3, show_default=True, help="n in k[x]/x^n.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def example_poly(order, output):
    """The truncated polynomial algebra k[x]/x^order."""
    _write_document(algebra_document(truncated_polynomial_algebra(order)), output)


# ---------------------------------------------------------------- selftest

@main.command()
@output_options
def selftest():
    """Run the acceptance suite."""
    results = []
    for crit in acceptance.CRITERIA:
        r = crit()
        click.echo(r.line(), err=True)
        results.append(r)
    ok = all(r.ok for r in results)
    rows = [[r.number, r.name, "PASS" if r.ok else "FAIL", r.detail] for r in results]
    payload = [{"criterion": r.number, "name": r.name, "ok": r.ok, "detail": r.detail}
               for r in results]
    return Report("selftest", digest([], {}), payload,
                  format_table(["#", "criterion", "status", "detail"], rows), _status(ok))


if __name__ == "__main__":
    main()
