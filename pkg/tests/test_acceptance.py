"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from bunched import calculus as K  # noqa: E402
from bunched.admissible import (  # noqa: E402
    box_idemp_inv,
    identity_expansion,
    invert_and_l,
    invert_emp_l,
    invert_sep_l,
    invert_true_l,
)
from bunched.algebra import (  # noqa: E402
    PowersetAlgebra,
    all_pcms,
    all_valuations,
    bis4_variants,
    chain_algebra,
    check_bi_axioms,
    interp_sequent,
    lukasiewicz_algebra,
    make_pcm,
    model_applicable,
    random_valuations,
    sequent_atoms,
)
from bunched.bterm import bterm_ctx_act_decomp, subst  # noqa: E402
from bunched.calculus import check_derivation  # noqa: E402
from bunched.cli import run_entry  # noqa: E402
from bunched.closure import (  # noqa: E402
    MooreClosure,
    RefusedConstruction,
    build_closed_algebra,
    enumerate_bases,
    exponential_ideal,
    is_strong,
)
from bunched.corpus import AFFINE_CFG, all_bunches, identity_formulas, inversion_inputs, load_corpus  # noqa: E402
from bunched.parsing import parse_sequent  # noqa: E402
from bunched.search import cut_eliminate, prove_cf  # noqa: E402
from bunched.syntax import (  # noqa: E402
    EMPA,
    EMPM,
    Comma,
    Leaf,
    Semi,
    Sequent,
    box_bunch,
    ctx_at_path,
    decompositions,
    focus,
    unbox_bunch,
    unbox_decompose,
)

from oracles import HOLE, brute_decompositions, brute_subst, formula_leaf_paths, replace_at, tokens  # noqa: E402
from test_bterm import instances  # noqa: E402
from test_syntax import check_locate  # noqa: E402

CORPUS = Path(__file__).resolve().parents[1] / "data" / "corpus"

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> bool:
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    return ok


# 1 ---------------------------------------------------------------------------


def criterion_1():
    start = time.perf_counter()
    entries = load_corpus(CORPUS / "kernel")
    passed = sum(run_entry(e)[0] for e in entries)
    elapsed = time.perf_counter() - start
    seen = Counter((e.rule, e.expect) for e in entries)
    covered = all(seen[str(r), x] == 1 for r in K.Rule for x in ("accept", "reject"))
    want = 2 * len(K.Rule)
    ok = covered and passed == len(entries) == want and elapsed < 5
    return ok, f"{passed}/{len(entries)} kernel entries over {len(K.Rule)} rules, {elapsed:.2f}s (limit 5s)"


# 2 ---------------------------------------------------------------------------


def criterion_2():
    start = time.perf_counter()
    bad = []
    total = 0
    for s4 in (False, True):
        cfg = K.BIS4 if s4 else K.BI
        for f in identity_formulas(2400, s4=s4):
            total += 1
            d = identity_expansion(f, s4=s4)
            if not (d.conclusion == Sequent(Leaf(f), f) and d.is_cut_free() and check_derivation(d, cfg)):
                bad.append(f)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 30
    return ok, f"{total - len(bad)}/{total} identity expansions accepted and cut-free, {elapsed:.2f}s (limit 30s)"


# 3 ---------------------------------------------------------------------------


def _doubly_boxed(d, ctx):
    """The largest doubly boxed sub-bunch around the leaf at ``ctx``."""
    frames = ctx.frames
    best = (ctx, unbox_bunch(unbox_bunch(focus(d.lhs, ctx))))
    for k in range(len(frames) - 1, -1, -1):
        outer = type(ctx)(frames[:k])
        inner = unbox_bunch(focus(d.lhs, outer))
        inner = inner and unbox_bunch(inner)
        if inner is None or inner in (EMPM, EMPA):
            break
        best = (outer, inner)
    return best


def _replace(d, ctx, new):
    return Sequent(ctx.fill(new), d.rhs)


STRICT = {
    "sep": (invert_sep_l, lambda f: Comma(Leaf(f.left), Leaf(f.right))),
    "and": (invert_and_l, lambda f: Semi(Leaf(f.left), Leaf(f.right))),
}
NON_INCREASING = {
    "top": (invert_true_l, lambda f: EMPA),
    "emp": (invert_emp_l, lambda f: EMPM),
}


def criterion_3(count: int = 500):
    start = time.perf_counter()
    broken = Counter()  # wrong conclusion, cut, rejected, or taller
    not_strict = Counter()
    for shape, (invert, replacement) in {**STRICT, **NON_INCREASING}.items():
        for d, ctx in inversion_inputs(shape, count, K.BI, seed=2024):
            out = invert(d, ctx)
            want = _replace(d, ctx, replacement(focus(d.lhs, ctx).formula))
            if not (out.conclusion == want and out.is_cut_free() and check_derivation(out, K.BI)):
                broken[shape] += 1
            elif out.height > d.height:
                broken[shape] += 1
            elif shape in STRICT and out.height >= d.height:
                not_strict[shape] += 1
    for d, ctx in inversion_inputs("boxbox", count, K.BIS4, seed=2024):
        where, delta = _doubly_boxed(d, ctx)
        out = box_idemp_inv(d, where, delta)
        want = _replace(d, where, box_bunch(delta))
        if not (out.conclusion == want and out.is_cut_free() and check_derivation(out, K.BIS4)) or out.height > d.height:
            broken["boxbox"] += 1
    elapsed = time.perf_counter() - start
    ok = not broken and not not_strict
    detail = (
        f"{count} inputs per shape; contract violations {dict(broken) or 0}; "
        f"not strictly smaller {dict(not_strict) or 0}; {elapsed:.2f}s"
    )
    return ok, detail


# 4 ---------------------------------------------------------------------------


def soundness_models(cfg):
    base = [PowersetAlgebra(p) for p in all_pcms(3)]
    if cfg.s4:
        models = [v for alg in base for v in bis4_variants(alg)]
    else:
        models = base + [chain_algebra(2), chain_algebra(3), chain_algebra(4), lukasiewicz_algebra(3), lukasiewicz_algebra(4)]
    return [m for m in models if model_applicable(m, cfg.struct_rules, cfg.s4) is None]


def criterion_4(valuations: int = 50):
    start = time.perf_counter()
    entries = [e for e in load_corpus(CORPUS) if e.expect != "reject"]
    violations = []
    checks = 0
    unmodelled = [e.name for e in entries if not soundness_models(e.config)]
    for i, e in enumerate(entries):
        if not check_derivation(e.derivation, e.config):
            violations.append((e.name, "rejected by the kernel", ""))
            continue
        sequents = {node.conclusion for node in e.derivation.nodes()}
        for alg in soundness_models(e.config):
            for s in sequents:
                atoms = sorted(sequent_atoms(s)) or ["a"]
                for v in random_valuations(alg, atoms, valuations, seed=i):
                    checks += 1
                    if not interp_sequent(s, alg, v):
                        violations.append((e.name, str(s), alg.name))
    elapsed = time.perf_counter() - start
    ok = not violations and not unmodelled and elapsed < 120
    return ok, (
        f"{len(entries)} accepted corpus derivations (all sub-derivations), {checks} evaluations, "
        f"{len(violations)} violations, {elapsed:.2f}s (limit 120s)"
    )


# 5 ---------------------------------------------------------------------------


def criterion_5():
    start = time.perf_counter()
    bases = built = mismatches = failures = 0
    for pcm in all_pcms(3):
        for basis in enumerate_bases(pcm):
            bases += 1
            mc = MooreClosure(basis)
            if is_strong(mc) != exponential_ideal(mc):
                mismatches += 1
            try:
                alg = build_closed_algebra(mc)
            except RefusedConstruction:
                continue
            built += 1
            failures += not check_bi_axioms(alg).ok
    elapsed = time.perf_counter() - start
    ok = built >= 200 and not mismatches and not failures and elapsed < 300
    detail = (
        f"{bases} bases over {len(all_pcms(3))} PCMs; {built} closed algebras built, {failures} axiom failures; "
        f"strength/ideal mismatches {mismatches}; {elapsed:.2f}s (limit 300s)"
    )
    return ok, detail


# 6 ---------------------------------------------------------------------------

NAMED_SHAPES = ("p , (p /\\ q) |- p * q", "(a , b) , c |- (a * b) * c")


def criterion_6():
    start = time.perf_counter()
    entries = load_corpus(CORPUS / "cut")
    families = Counter(e.name.split("-")[1] for e in entries)
    conclusions = {str(e.derivation.conclusion) for e in entries}
    eliminated = 0
    for e in entries:
        cfg = e.config.without_cut()
        if not check_derivation(e.derivation, e.config) or e.derivation.is_cut_free():
            continue
        out = cut_eliminate(e.derivation, cfg, 12)
        if out is not None and out.is_cut_free() and out.conclusion == e.derivation.conclusion and check_derivation(out, cfg):
            eliminated += 1
    elapsed = time.perf_counter() - start
    shapes = all(str(parse_sequent(s)) in conclusions for s in NAMED_SHAPES)
    ok = len(entries) >= 40 and eliminated == len(entries) and shapes and set(families) == {"bi", "affine", "s4"} and elapsed < 120
    return ok, f"{eliminated}/{len(entries)} cut-bearing derivations eliminated within depth 12 {dict(families)}, {elapsed:.2f}s (limit 120s)"


# 7 ---------------------------------------------------------------------------


def criterion_7():
    ineq = parse_sequent("p * q |- p")
    affine_models = [chain_algebra(3), lukasiewicz_algebra(4)]
    holds = all(interp_sequent(ineq, m, v) for m in affine_models for v in all_valuations(m, ["p", "q"]))
    heap = PowersetAlgebra(make_pcm(["e", "x", "y", "xy"], "e", {("x", "y"): "xy"}))
    fails = not all(interp_sequent(ineq, heap, v) for v in all_valuations(heap, ["p", "q"]))
    goal = parse_sequent("a*b |- a")
    with_rule = prove_cf(goal, AFFINE_CFG, 12)
    accepted = with_rule is not None and bool(check_derivation(with_rule, AFFINE_CFG))
    without = prove_cf(goal, K.BI, 12)
    ok = holds and fails and accepted and without is None
    return ok, (
        f"inequality holds in affine models: {holds}; fails in heap powerset: {fails}; "
        f"provable and accepted with the rule: {accepted}; unprovable without at depth 12: {without is None}"
    )


# 8 ---------------------------------------------------------------------------


def criterion_8():
    discrepancies = Counter()
    cases = Counter()
    for b in all_bunches(5):
        cases["decompositions"] += 1
        mine = sorted(((d.ctx.fill(HOLE), d.leaf) for d in decompositions(b)), key=repr)
        if mine != brute_decompositions(b):
            discrepancies["decompositions"] += 1
        try:
            cases["locate_in_filled"] += check_locate(b)
        except AssertionError:
            discrepancies["locate_in_filled"] += 1
        boxed = box_bunch(b)
        for p, f in formula_leaf_paths(boxed):
            cases["unbox_decompose"] += 1
            ctx, _ = ctx_at_path(boxed, tokens(boxed, p))
            pi = unbox_decompose(boxed, ctx, f.body)
            if pi.fill(HOLE) != replace_at(b, p, HOLE) or box_bunch(pi.fill(HOLE)) != ctx.fill(box_bunch(HOLE)):
                discrepancies["unbox_decompose"] += 1
    for t, env in instances(5):
        inst, where = brute_subst(t, env)
        for p, f in formula_leaf_paths(inst):
            cases["bterm_ctx_act_decomp"] += 1
            ctx, _ = ctx_at_path(inst, tokens(inst, p))
            j, pi = bterm_ctx_act_decomp(t, env, ctx, f)
            base = where[j]
            good = p[: len(base)] == base and subst(t, {**env, j: pi.fill(HOLE)}) == replace_at(inst, p, HOLE)
            discrepancies["bterm_ctx_act_decomp"] += not good
    ok = sum(discrepancies.values()) == 0 and all(cases[k] > 0 for k in ("decompositions", "locate_in_filled", "unbox_decompose", "bterm_ctx_act_decomp"))
    return ok, f"cases {dict(cases)}; discrepancies {sum(discrepancies.values())}"


# ---------------------------------------------------------------------------

CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def _run(n):
    ok, detail = CRITERIA[n]()
    assert record(n, ok, detail), RESULTS[n]


def test_criterion_1_kernel_coverage():
    _run(1)


def test_criterion_2_identity_expansion():
    _run(2)


def test_criterion_3_inversion_heights():
    _run(3)


def test_criterion_4_soundness():
    _run(4)


def test_criterion_5_closure_lifting():
    _run(5)


def test_criterion_6_cut_admissibility():
    _run(6)


def test_criterion_7_extension_validation():
    _run(7)


def test_criterion_8_decomposition_oracle():
    _run(8)


if __name__ == "__main__":
    failed = 0
    for n, fn in CRITERIA.items():
        ok, detail = fn()
        record(n, ok, detail)
        print(RESULTS[n], flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
