"""The acceptance suite: one function per criterion, each returning a ``CriterionResult``.

Shared by ``hcb selftest`` and the test suite.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import (Algebra, Module, direct_sum, diagonal_algebra, full_matrix_algebra,
                      product_algebra, truncated_polynomial_algebra,
                      upper_triangular_algebra)
from .blocks import (apply_word, block_decompose, equality_relation, ext_quiver,
                     ext_relation, fitting_split, support)
from .gwa import (ORIGIN, GluedFamily, GluedGamma, WindowError, finite_glued_model,
                  glued_labels, glued_pair, gwa_double_quotient, gwa_family_window,
                  gwa_quotient, point_label)
from .hc import (ConcreteFamily, PairPresentation, build_preorder, decompose_hc_module,
                 partition_classes, quotient_support, containment_witnesses)
from .linalg import Matrix, block_diagonal
from .stages import (StageError, block_words, check_associativity, check_gamma_action,
                     check_independence, check_unit, completion_stage, cyclicity_check,
                     double_quotient, quasiregular_check, radical_stage,
                     random_stage_element, semisimple_stage_check, separating_word,
                     settle_words)


@dataclass
class CriterionResult:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, name: str):
    def wrap(fn: Callable[..., tuple[bool, str, list]]):
        def run(*args, **kwargs) -> CriterionResult:
            start = time.perf_counter()
            ok, detail, failures = fn(*args, **kwargs)
            return CriterionResult(number, name, ok, detail,
                                   time.perf_counter() - start, failures)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# ---------------------------------------------------------------- random modules

def small_algebras() -> dict[str, Algebra]:
    return {
        "UT2": upper_triangular_algebra(2),
        "UT3": upper_triangular_algebra(3),
        "k[x]/x^3": truncated_polynomial_algebra(3),
        "kxk": diagonal_algebra(2),
        "M2": full_matrix_algebra(2),
        "UT2 x k[x]/x^2": product_algebra(upper_triangular_algebra(2),
                                          truncated_polynomial_algebra(2)),
        "glued origin": GluedGamma([ORIGIN], 1).algebra(),
    }


def random_vector(n: int, rng: random.Random, span: int = 2) -> tuple:
    return tuple(Fraction(rng.randint(-span, span)) for _ in range(n))


def random_module(alg: Algebra, rng: random.Random, max_dim: int = 8) -> Module:
    """A submodule, or a quotient of a submodule, of a sum of regular modules."""
    side = rng.choice(("left", "right"))
    reg = alg.regular_module(side)
    copies = max(1, min(3, max_dim // alg.dim or 1))
    total = direct_sum([reg] * rng.randint(1, copies))
    for _ in range(20):
        gens = [random_vector(total.dim, rng) for _ in range(rng.randint(1, 2))]
        sub = total.spin(gens)
        if 0 < sub.dim <= max_dim:
            break
    else:
        sub = reg.spin([alg.unit])
    mod = total.submodule(sub)
    if mod.dim > 1 and rng.random() < 0.5:
        inner = mod.spin([random_vector(mod.dim, rng)])
        if inner.dim < mod.dim:
            mod = mod.quotient(inner)
    return mod


# ---------------------------------------------------------------- criteria

@_timed(1, "Ext quiver of the truncated glued algebra")
def criterion_1(time_limit: float = 10.0):
    start = time.perf_counter()
    gg = GluedGamma([ORIGIN, (1, 3), (Fraction(5, 2), 7)], 2)
    alg = gg.algebra()
    quiver = ext_quiver(alg)
    elapsed = time.perf_counter() - start
    up, lo = glued_labels()
    off = {(s, t): d for (s, t), d in quiver.edge_dims.items() if s != t}
    nonzero = {k: d for k, d in off.items() if d}
    ok = nonzero == {(lo, up): 1} and elapsed < time_limit
    return ok, f"dim {alg.dim}, nonzero off-diagonal entries {nonzero}, " \
        f"{elapsed:.2f}s of {time_limit:.0f}s", [] if ok else [nonzero, elapsed]


@_timed(2, "block decomposition totality")
def criterion_2(trials: int = 210, seed: int = 2):
    rng = random.Random(seed)
    algs = small_algebras()
    rels = {k: ext_relation(a) for k, a in algs.items()}
    names = sorted(algs)
    failures = []
    for t in range(trials):
        name = names[t % len(names)]
        mod = random_module(algs[name], rng)
        part = block_decompose(mod, rels[name])
        if not (part.is_total() and sum(s.dim for s in part.pieces.values()) == mod.dim):
            failures.append((name, t))
    return not failures, f"{trials} modules over {len(algs)} algebras, " \
        f"{len(failures)} failures", failures


@_timed(3, "support of short exact sequences")
def criterion_3(trials: int = 210, seed: int = 3):
    rng = random.Random(seed)
    algs = small_algebras()
    rels = {k: ext_relation(a) for k, a in algs.items()}
    names = sorted(algs)
    failures = []
    for t in range(trials):
        name = names[t % len(names)]
        mod = random_module(algs[name], rng)
        sub = mod.spin([random_vector(mod.dim, rng)])
        whole = set(support(mod, rels[name]))
        parts = set(support(mod.submodule(sub), rels[name])) | \
            set(support(mod.quotient(sub), rels[name]))
        if whole != parts:
            failures.append((name, t))
    return not failures, f"{trials} sequences, {len(failures)} failures", failures


@_timed(4, "Fitting split")
def criterion_4(trials: int = 120, seed: int = 4):
    rng = random.Random(seed)
    algs = small_algebras()
    rels = {k: ext_relation(a) for k, a in algs.items()}
    names = sorted(algs)
    failures = []
    splits = 0
    for t in range(trials):
        name = names[t % len(names)]
        mod = random_module(algs[name], rng)
        rel = rels[name]
        for cls in block_decompose(mod, rel).support:
            fs = fitting_split(mod, cls, rel)
            members = rel.members(cls)
            onto = all(mod.image(m.ideal, fs.complement) == fs.complement for m in members)
            by = {m.label: m for m in members}
            kills = apply_word(mod, [by[x] for x in fs.word], fs.block_space).is_zero()
            splits += 1
            if not (onto and kills):
                failures.append((name, t, cls))
    return not failures, f"{splits} splits, {len(failures)} failures", failures


@_timed(5, "GWA window dimensions and supports")
def criterion_5():
    failures = []
    count = 0
    for point in (ORIGIN, (1, 5)):
        for side in ("left", "right"):
            for m in (1, 2, 3):
                for window in (2, 3):
                    mod = gwa_quotient(point, m, window, side)
                    want = m * (m + 1) // 2
                    dims_ok = len(mod.weight_dims) == 2 * window + 1 and \
                        all(d == want for d in mod.interior.values())
                    eq = equality_relation(mod.family.gamma)
                    res = quotient_support(
                        PairPresentation(mod.family.gamma, mod.family),
                        (point_label(mod.point),) * m, eq, side)
                    got = {c[0] for c in res.support}
                    sign = 2 if side == "left" else -2
                    expect = {point_label((mod.point[0] + sign * n, mod.point[1]))
                              for n in range(-window, window + 1)}
                    count += 1
                    if not (dims_ok and got == expect):
                        failures.append((point, side, m, window))
    return not failures, f"{count} windows, {len(failures)} failures", failures


@_timed(6, "double quotients of the GWA")
def criterion_6(window: int = 3):
    failures = []
    certs = 0
    for point in (ORIGIN, (1, 5)):
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                res = gwa_double_quotient(point, i, j, window)
                certs += len(res.certificates)
                if not res.ok:
                    failures.append((point, i, j, res.dim, res.expected))
    return not failures, f"18 stages, {certs} membership certificates, " \
        f"{len(failures)} failures", failures


def glued_stage_example(window: int = 1, order: int = 3):
    pp = glued_pair(window, order)
    return pp, ext_relation(pp.gamma)


def stage_law_trials(pp, rel, triples: int, rng: random.Random, max_len: int = 2,
                     max_exp: int | None = None):
    """Random stage triples checked against the four category laws.

    Returns ``(completed, counts per law, failures)``; triples whose words run
    past the truncation order are redrawn.
    """
    classes = list(rel.classes)
    words = {cls: block_words(rel, cls, max_len, max_exp) for cls in classes}
    counts = {"unit": 0, "gamma action": 0, "independence": 0, "associativity": 0}
    failures = []
    done = attempts = 0
    while done < triples and attempts < 20 * triples:
        attempts += 1
        b, c, d, e = (rng.choice(classes) for _ in range(4))
        m, k = rng.choice(words[b]), rng.choice(words[e])
        try:
            n, l = settle_words(pp, rel, m, k, c, d)
            if not n or not l:
                continue
            alpha = random_stage_element(double_quotient(pp, m, n), rng)
            beta = random_stage_element(double_quotient(pp, n, l), rng)
            delta = random_stage_element(double_quotient(pp, l, k), rng)
            if not (alpha.stage.dim and beta.stage.dim and delta.stage.dim):
                continue
            results = [check_associativity(delta, beta, alpha, rel),
                       check_independence(beta, alpha, rel, rng)]
            # unit of A(C, C) at (mc, n mc) composed with beta
            mc = rng.choice(words[c])
            nu = separating_word(pp, rel, mc, l, c).word + mc
            results.append(check_unit(random_stage_element(double_quotient(pp, nu, l), rng),
                                      mc, rel))
            lc = rng.choice(words[c])
            n2 = separating_word(pp, rel, m, lc, c).word
            if n2:
                a2 = random_stage_element(double_quotient(pp, m, n2), rng)
                g = tuple(Fraction(rng.randint(-2, 2)) for _ in range(pp.gamma.dim))
                results.append(check_gamma_action(a2, g, lc, rel))
        except (WindowError, StageError):
            continue
        done += 1
        for r in results:
            counts[r.name] += 1
            if not r.ok:
                failures.append((r.name, m, n, l, k, r.detail))
    return done, counts, failures


@_timed(7, "category laws at stages")
def criterion_7(triples: int = 100, seed: int = 7, window: int = 1, order: int = 3):
    pp, rel = glued_stage_example(window, order)
    done, counts, failures = stage_law_trials(pp, rel, triples, random.Random(seed), 2, order)
    ok = not failures and done >= triples
    return ok, f"{done} triples ({counts}), {len(failures)} failures", failures


@_timed(8, "completion stages")
def criterion_8(order: int = 4, max_len: int = 4):
    gg = GluedGamma([ORIGIN], order)
    gamma = gg.algebra()
    rel = ext_relation(gamma)
    up, lo = glued_labels()
    block = rel.class_of(up)
    failures = []
    words = block_words(rel, block, max_len, order)
    for w in words:
        st = completion_stage(gamma, rel, w)
        rad = radical_stage(st)
        if not (rad.agree and semisimple_stage_check(st).ok and quasiregular_check(st)):
            failures.append(w)
    st = completion_stage(gamma, rel, (up, lo))
    ss = semisimple_stage_check(st)
    dims = (ss.stage_dim, ss.semisimple_dim)
    if dims != (3, 2):
        failures.append(("dims", dims))
    return not failures, f"{len(words)} words, Gamma/word at ({up},{lo}) has dims " \
        f"{dims[0]} -> {dims[1]}, {len(failures)} failures", failures


def _product_model() -> tuple[PairPresentation, str]:
    """The order-1 finite model times the pair (diagonal 2x2 inside 2x2 upper triangular)."""
    fm = finite_glued_model(1)
    ut, dg = upper_triangular_algebra(2), diagonal_algebra(2)
    big = product_algebra(fm.big, ut)
    gamma = product_algebra(fm.gamma, dg)
    # diagonal units E00, E11 sit at basis 0 and 2 of UT2
    emb = Matrix([[1, 0], [0, 0], [0, 1]], 2)
    embedding = block_diagonal([fm.embedding, emb])
    fam = ConcreteFamily(big, gamma, embedding)
    return PairPresentation(gamma, fam), "finite model x (diag in UT2)"


def concrete_models() -> list[tuple[str, PairPresentation]]:
    out = []
    for order in (1, 2):
        fm = finite_glued_model(order)
        fam = ConcreteFamily(fm.big, fm.gamma, fm.embedding)
        out.append((f"finite glued model, order {order}", PairPresentation(fm.gamma, fam)))
    pp, name = _product_model()
    out.append((name, pp))
    return out


@_timed(9, "preorder and HC decomposition on finite models")
def criterion_9(seed: int = 9, extra_modules: int = 4):
    rng = random.Random(seed)
    failures = []
    summary = []
    for name, pp in concrete_models():
        rel = ext_relation(pp.gamma)
        pre = build_preorder(pp, rel)
        where = partition_classes(pre.delta())
        big = pp.family.big
        modules = [big.regular_module("left")]
        for _ in range(extra_modules):
            modules.append(random_module(big, rng, max_dim=big.dim))
        modules = [m for m in modules if m.side == "left"]
        for mod in modules:
            try:
                dec = decompose_hc_module(pp, mod, rel, pre)
            except Exception as exc:  # invariance failure is a falsified theorem
                failures.append((name, str(exc)))
                continue
            expected = {where[c] for c in dec.partition.support}
            got = [where[d[0]] for d, _ in dec.summands]
            if sorted(got) != sorted(expected) or \
                    sum(s.dim for _, s in dec.summands) != mod.dim:
                failures.append((name, "summands do not match delta"))
            bad = containment_witnesses(pp, mod, rel, pre)
            if bad:
                failures.append((name, bad[:3]))
        summary.append(f"{name}: {len(pre.delta())} delta classes")
    return not failures, "; ".join(summary) + f"; {len(failures)} failures", failures


@_timed(10, "cyclicity of endomorphism stages")
def criterion_10():
    stages = []
    gg_fam = GluedFamily([ORIGIN], 4)
    pp = PairPresentation(gg_fam.gamma, gg_fam)
    rel = ext_relation(pp.gamma)
    block = rel.class_of(glued_labels()[0])
    words = block_words(rel, block, 2)
    stages += [double_quotient(pp, a, b) for a in words for b in words]
    pw, relw = glued_stage_example()
    bw = block_words(relw, relw.class_of(glued_labels()[0]), 2, 3)
    stages += [double_quotient(pw, a, b) for a in bw for b in bw]
    for point in (ORIGIN, (1, 5)):
        fam = gwa_family_window(point, 3, 2)
        pg = PairPresentation(fam.gamma, fam)
        lab = point_label(point)
        ws = [(lab,) * i for i in (1, 2, 3)]
        stages += [double_quotient(pg, a, b) for a in ws for b in ws]
    results = cyclicity_check(stages)
    failures = [r.stage for r in results if not (r.left and r.right)]
    return not failures, f"{len(results)} stages, {len(failures)} non-cyclic", failures


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all() -> list[CriterionResult]:
    return [c() for c in CRITERIA]
