"""Bounded backward search for cut-free derivations.

The search is untrusted: it builds derivations through the kernel's
constructors and callers check the result.  Strategy, per goal:

1. leaf rules (Ax, EmpR, TrueR, FalseL);
2. drop goals refuted by a small finite countermodel (sound by soundness);
3. saturate invertible rules (sepL, andL, trueL, empL on the left, -*R and
   ->R on the right), committing to the first one;
4. branch over right rules, then the remaining left rules, then structural
   rules (W;, simple structural rules, C;).

Shapes demanded by a rule are reached with one ``Equiv`` node.  Heights
are bounded by iterative deepening and ``C;`` by a per-branch count.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from . import calculus as K
from .algebra import (
    FiniteBiAlgebra,
    PowersetAlgebra,
    all_pcms,
    bis4_variants,
    chain_algebra,
    find_countermodel,
    lukasiewicz_algebra,
    model_applicable,
)
from .bterm import BTerm, RuleSet, TComma, TSemi, Var, subst, variables
from .calculus import CalculusConfig, Derivation
from .syntax import (
    BOT,
    EMP,
    EMPA,
    EMPM,
    TOP,
    And,
    Atom,
    Box,
    Bunch,
    BunchCtx,
    Comma,
    Emp,
    Formula,
    Impl,
    Leaf,
    Or,
    Semi,
    SemiR,
    Sep,
    Sequent,
    Top,
    Wand,
    decompositions,
    formula_positions,
    from_region,
    normalize,
    region_items,
    unbox_bunch,
)

IDENTITY = BunchCtx()


@dataclass(frozen=True)
class SearchOptions:
    contraction_bound: int = 2
    prune_with_models: bool = True
    max_split_items: int = 7
    saturate: bool = True  # commit to invertible rules; False makes them ordinary choices


# ---------------------------------------------------------------------------
# Countermodels used for pruning

_MODEL_CACHE: dict[tuple, list[FiniteBiAlgebra]] = {}


def pruning_models(cfg: CalculusConfig) -> list[FiniteBiAlgebra]:
    """Small algebras that are models of ``cfg``; a sequent false in one is unprovable."""
    key = (cfg.struct_rules, cfg.s4)
    if key not in _MODEL_CACHE:
        base: list[FiniteBiAlgebra] = [PowersetAlgebra(p) for p in all_pcms(2)]
        base += [chain_algebra(3), lukasiewicz_algebra(3), lukasiewicz_algebra(4)]
        if cfg.s4:
            boxed = []
            for alg in base:
                if isinstance(alg, PowersetAlgebra):
                    boxed += bis4_variants(alg)
                else:
                    boxed.append(alg.with_box(lambda x: x, f"{alg.name}+id"))
            base = boxed
        _MODEL_CACHE[key] = [a for a in base if model_applicable(a, cfg.struct_rules, cfg.s4) is None]
    return _MODEL_CACHE[key]


# ---------------------------------------------------------------------------
# Helpers


def _splits(items: Sequence[Bunch]) -> Iterator[tuple[list[Bunch], list[Bunch]]]:
    """Ordered two-way partitions of a multiset, each one once."""
    seen = set()
    n = len(items)
    for mask in range(1 << n):
        left = [items[i] for i in range(n) if mask >> i & 1]
        right = [items[i] for i in range(n) if not mask >> i & 1]
        key = (tuple(map(str, left)), tuple(map(str, right)))
        if key not in seen:
            seen.add(key)
            yield left, right


def _region_roots(b: Bunch) -> list[tuple[BunchCtx, type, Bunch]]:
    """Positions of maximal same-connective regions of ``b`` (as a tree)."""
    out = []
    for dec in decompositions(b):
        sub = dec.leaf
        if not isinstance(sub, (Comma, Semi)):
            continue
        op = "," if isinstance(sub, Comma) else ";"
        if dec.ctx.frames and dec.ctx.frames[-1].op == op:
            continue
        out.append((dec.ctx, type(sub), sub))
    return out


def _region_of_leaf(b: Bunch, ctx: BunchCtx, op: str) -> BunchCtx:
    """Context of the root of the maximal ``op``-region containing the leaf at ``ctx``."""
    frames = ctx.frames
    k = len(frames)
    while k > 0 and frames[k - 1].op == op:
        k -= 1
    return BunchCtx(frames[:k])


def _remove_one(items: list[Bunch], x: Bunch) -> list[Bunch]:
    out = list(items)
    out.remove(x)
    return out


def _match(t: BTerm, b: Bunch) -> Iterator[dict[int, Bunch]]:
    """Instantiations of the linear term ``t`` whose substitution is ≡ the normalized ``b``."""
    if isinstance(t, Var):
        yield {t.index: b}
        return
    op = Comma if isinstance(t, TComma) else Semi
    items = region_items(b, op)
    if len(items) < 2:
        return
    for left, right in _splits(items):
        if not left or not right:
            continue
        for e1 in _match(t.left, from_region(left, op)):
            for e2 in _match(t.right, from_region(right, op)):
                yield {**e1, **e2}


@dataclass
class _Candidate:
    """One way to apply a rule: the shape it needs, its premises, and how to assemble it."""

    shape: Bunch  # conclusion lhs the rule produces (≡ the goal)
    premises: list[tuple[Bunch, Formula]]
    build: Callable[[list[Derivation]], Derivation]
    cost: int = 1  # height the rule itself adds above its premises
    contractions: int = 0


# ---------------------------------------------------------------------------
# The prover


class Prover:
    def __init__(self, cfg: CalculusConfig, options: SearchOptions = SearchOptions()):
        self.cfg = K.CalculusConfig(cfg.struct_rules, cfg.s4, False)
        self.options = options
        self.models = pruning_models(self.cfg) if options.prune_with_models else []
        self.failed: set = set()
        self.refuted: dict[Sequent, bool] = {}
        self.nodes = 0

    # entry ---------------------------------------------------------------

    def prove(self, s: Sequent, budget: int) -> Derivation | None:
        for b in range(budget + 1):
            d = self.goal(s.lhs, s.rhs, b, self.options.contraction_bound, frozenset())
            if d is not None:
                return d
        return None

    # goals ---------------------------------------------------------------

    def goal(self, lhs: Bunch, rhs: Formula, b: int, c: int, ancestors: frozenset) -> Derivation | None:
        self.nodes += 1
        leaf = self.leaf_rule(lhs, rhs)
        if leaf is not None:
            return leaf
        if b <= 0:
            return None
        key = (lhs, rhs, b, c)
        if key in self.failed:
            return None
        norm = Sequent(normalize(lhs), rhs)
        if norm in ancestors:
            return None
        if self.is_refuted(norm):
            self.failed.add(key)
            return None
        ancestors = ancestors | {norm}
        d = self.expand(lhs, rhs, b, c, ancestors)
        if d is None:
            self.failed.add(key)
        return d

    def is_refuted(self, s: Sequent) -> bool:
        if not self.models:
            return False
        hit = self.refuted.get(s)
        if hit is None:
            hit = find_countermodel(s, self.models, exhaustive_limit=256, samples=24) is not None
            self.refuted[s] = hit
        return hit

    def leaf_rule(self, lhs: Bunch, rhs: Formula) -> Derivation | None:
        if isinstance(rhs, Atom) and lhs == Leaf(rhs):
            return K.ax(rhs)
        if lhs == EMPM and rhs == EMP:
            return K.emp_r()
        if lhs == EMPA and rhs == TOP:
            return K.true_r()
        for ctx, f in formula_positions(lhs):
            if f == BOT:
                return K.false_l(ctx, rhs)
        return None

    def expand(self, lhs: Bunch, rhs: Formula, b: int, c: int, anc: frozenset) -> Derivation | None:
        if self.options.saturate:
            # invertible rules: commit to the first applicable one
            for cand in self.invertible_candidates(lhs, rhs):
                (p_lhs, p_rhs), = cand.premises
                p = self.goal(p_lhs, p_rhs, b - 1, c, anc)
                return None if p is None else cand.build([p])

        for cand in self.candidates(lhs, rhs, c):
            extra = 0 if cand.shape == lhs else 1
            sub_b = b - cand.cost - extra
            if sub_b < 0 or cand.contractions > c:
                continue
            premises = []
            for p_lhs, p_rhs in cand.premises:
                p = self.goal(p_lhs, p_rhs, sub_b, c - cand.contractions, anc)
                if p is None:
                    break
                premises.append(p)
            else:
                return K.equiv(cand.build(premises), lhs)
        return None

    # candidate rule applications ------------------------------------------

    def invertible_candidates(self, lhs: Bunch, rhs: Formula) -> Iterator[_Candidate]:
        for ctx, f in formula_positions(lhs):
            rule = _INVERTIBLE_LEFT.get(type(f))
            if rule is not None:
                yield _Candidate(lhs, [(ctx.fill(_left_replacement(f)), rhs)], lambda ps, rule=rule, ctx=ctx: rule(ps[0], ctx))
        if isinstance(rhs, Wand):
            yield _Candidate(lhs, [(Comma(lhs, Leaf(rhs.left)), rhs.right)], lambda ps: K.wand_r(ps[0]))
        if isinstance(rhs, Impl):
            yield _Candidate(lhs, [(Semi(lhs, Leaf(rhs.left)), rhs.right)], lambda ps: K.impl_r(ps[0]))

    def candidates(self, lhs: Bunch, rhs: Formula, c: int) -> Iterator[_Candidate]:
        norm = normalize(lhs)
        if not self.options.saturate:
            yield from self.invertible_candidates(lhs, rhs)
        yield from self.unit_candidates(norm, rhs)
        yield from self.right_candidates(lhs, rhs, c)
        yield from self.left_candidates(lhs, rhs, c)
        yield from self.structural_candidates(lhs, rhs, c)

    def unit_candidates(self, norm: Bunch, rhs: Formula) -> Iterator[_Candidate]:
        if isinstance(rhs, Atom) and norm == Leaf(rhs):
            yield _Candidate(norm, [], lambda ps: K.ax(rhs), cost=0)
        elif rhs == EMP and norm == EMPM:
            yield _Candidate(EMPM, [], lambda ps: K.emp_r(), cost=0)
        elif rhs == TOP and norm == EMPA:
            yield _Candidate(EMPA, [], lambda ps: K.true_r(), cost=0)

    def right_candidates(self, lhs: Bunch, rhs: Formula, c: int) -> Iterator[_Candidate]:
        if isinstance(rhs, Sep):
            items = region_items(lhs, Comma)
            if len(items) <= self.options.max_split_items:
                for g1, g2 in _splits(items):
                    d1, d2 = from_region(g1, Comma), from_region(g2, Comma)
                    yield _Candidate(Comma(d1, d2), [(d1, rhs.left), (d2, rhs.right)], lambda ps: K.sep_r(*ps))
        elif isinstance(rhs, And):
            items = region_items(lhs, Semi)
            if len(items) <= self.options.max_split_items:
                for g1, g2 in _splits(items):
                    d1, d2 = from_region(g1, Semi), from_region(g2, Semi)
                    yield _Candidate(Semi(d1, d2), [(d1, rhs.left), (d2, rhs.right)], lambda ps: K.and_r(*ps))
            # contract the whole bunch and give a copy to each side
            yield _Candidate(
                lhs,
                [(lhs, rhs.left), (lhs, rhs.right)],
                lambda ps: K.contract_semi(K.and_r(*ps), IDENTITY),
                cost=2,
                contractions=1,
            )
        elif isinstance(rhs, Or):
            yield _Candidate(lhs, [(lhs, rhs.left)], lambda ps: K.disj_r1(ps[0], rhs.right))
            yield _Candidate(lhs, [(lhs, rhs.right)], lambda ps: K.disj_r2(ps[0], rhs.left))
        elif isinstance(rhs, Box) and self.cfg.s4 and unbox_bunch(lhs) is not None:
            yield _Candidate(lhs, [(lhs, rhs.body)], lambda ps: K.box_r(ps[0]))

    def left_candidates(self, lhs: Bunch, rhs: Formula, c: int) -> Iterator[_Candidate]:
        positions = formula_positions(lhs)
        for ctx, f in positions:
            if isinstance(f, Or):
                yield _Candidate(
                    lhs,
                    [(ctx.fill(Leaf(f.left)), rhs), (ctx.fill(Leaf(f.right)), rhs)],
                    lambda ps, ctx=ctx: K.disj_l(ps[0], ps[1], ctx),
                )
        for ctx, f in positions:
            if isinstance(f, Wand):
                yield from self.wand_l_candidates(lhs, rhs, ctx, f)
            elif isinstance(f, Impl):
                yield from self.impl_l_candidates(lhs, rhs, ctx, f, c)
            elif isinstance(f, Box) and self.cfg.s4:
                yield _Candidate(lhs, [(ctx.fill(Leaf(f.body)), rhs)], lambda ps, ctx=ctx: K.box_l(ps[0], ctx))

    def wand_l_candidates(self, lhs, rhs, ctx, f: Wand) -> Iterator[_Candidate]:
        pi = _region_of_leaf(lhs, ctx, ",")
        others = _remove_one(region_items(_focus(lhs, pi), Comma), Leaf(f))
        if len(others) > self.options.max_split_items:
            return
        for g1, g2 in _splits(others):
            d1, d2 = from_region(g1, Comma), from_region(g2, Comma)
            shape = pi.fill(Comma(Comma(d1, d2), Leaf(f)))
            major = pi.fill(Comma(d2, Leaf(f.right)))
            yield _Candidate(shape, [(d1, f.left), (major, rhs)], lambda ps, pi=pi: K.wand_l(ps[0], ps[1], pi))

    def impl_l_candidates(self, lhs, rhs, ctx, f: Impl, c: int) -> Iterator[_Candidate]:
        pi = _region_of_leaf(lhs, ctx, ";")
        others = _remove_one(region_items(_focus(lhs, pi), Semi), Leaf(f))
        if len(others) > self.options.max_split_items:
            return
        gamma = from_region(others, Semi)
        if c > 0:
            # keep the implication for the minor premise: Γ ; φ->ψ |- φ and Π(Γ ; ψ) |- χ
            whole = Semi(gamma, Leaf(f)) if others else Leaf(f)

            def build_keep(ps, pi=pi, whole=whole):
                d = K.impl_l(ps[0], ps[1], pi)
                d = K.equiv(d, pi.fill(Semi(whole, whole)))
                return K.contract_semi(d, pi)

            yield _Candidate(
                pi.fill(whole),
                [(whole, f.left), (pi.fill(Semi(gamma, Leaf(f.right))), rhs)],
                build_keep,
                cost=3,
                contractions=1,
            )
        for g1, g2 in _splits(others):
            d1, d2 = from_region(g1, Semi), from_region(g2, Semi)
            shape = pi.fill(Semi(Semi(d1, d2), Leaf(f)))
            major = pi.fill(Semi(d2, Leaf(f.right)))
            yield _Candidate(shape, [(d1, f.left), (major, rhs)], lambda ps, pi=pi: K.impl_l(ps[0], ps[1], pi))
        if c > 0 and others:
            # share Γ between both premises
            def build_share(ps, pi=pi, f=f):
                return K.contract_semi(K.impl_l(ps[0], ps[1], pi), pi.then(SemiR(Leaf(f))))

            yield _Candidate(
                pi.fill(Semi(gamma, Leaf(f))),
                [(gamma, f.left), (pi.fill(Semi(gamma, Leaf(f.right))), rhs)],
                build_share,
                cost=2,
                contractions=1,
            )

    def structural_candidates(self, lhs: Bunch, rhs: Formula, c: int) -> Iterator[_Candidate]:
        # additive weakening inside a ';'-region, or of everything down to ∅a
        for pi, op, sub in _region_roots(lhs):
            if op is not Semi:
                continue
            items = region_items(sub, Semi)
            if len(items) > self.options.max_split_items:
                continue
            for keep, drop in _splits(items):
                if not drop:
                    continue
                k, dr = from_region(keep, Semi), from_region(drop, Semi)
                yield _Candidate(
                    pi.fill(Semi(k, dr)), [(pi.fill(k), rhs)], lambda ps, pi=pi, dr=dr: K.weaken_semi(ps[0], pi, dr)
                )
        if not isinstance(normalize(lhs), Semi) and lhs != EMPA:
            yield _Candidate(Semi(EMPA, lhs), [(EMPA, rhs)], lambda ps, lhs=lhs: K.weaken_semi(ps[0], IDENTITY, lhs))

        # simple structural rules, matched up to ≡ at region roots and leaves
        for i, rule in enumerate(self.cfg.struct_rules):
            if set(rule.variables()) - set(variables(rule.conclusion)):
                continue  # premise-only variables cannot be guessed
            sites = [(IDENTITY, lhs)] + [(pi, sub) for pi, _, sub in _region_roots(lhs) if pi.frames]
            sites += [(ctx, Leaf(f)) for ctx, f in formula_positions(lhs)]
            seen = set()
            for pi, sub in sites:
                for env in _match(rule.conclusion, normalize(sub)):
                    shape = pi.fill(subst(rule.conclusion, env))
                    prem = [(pi.fill(subst(t, env)), rhs) for t in rule.premises]
                    key = (shape, tuple(p for p, _ in prem))
                    if key in seen:
                        continue
                    seen.add(key)
                    yield _Candidate(
                        shape,
                        prem,
                        lambda ps, pi=pi, i=i, rule=rule, env=env: K.struct_ext(ps, rhs, pi, i, rule, env),
                    )

        if c > 0:
            yield _Candidate(lhs, [(Semi(lhs, lhs), rhs)], lambda ps: K.contract_semi(ps[0], IDENTITY), contractions=1)
            for ctx, f in formula_positions(lhs):
                if ctx.frames:
                    dup = ctx.fill(Semi(Leaf(f), Leaf(f)))
                    yield _Candidate(lhs, [(dup, rhs)], lambda ps, ctx=ctx: K.contract_semi(ps[0], ctx), contractions=1)


def _focus(b: Bunch, ctx: BunchCtx) -> Bunch:
    from .syntax import focus

    return focus(b, ctx)


_INVERTIBLE_LEFT = {Sep: K.sep_l, And: K.and_l, Top: K.true_l, Emp: K.emp_l}


def _left_replacement(f: Formula) -> Bunch:
    if isinstance(f, Sep):
        return Comma(Leaf(f.left), Leaf(f.right))
    if isinstance(f, And):
        return Semi(Leaf(f.left), Leaf(f.right))
    if isinstance(f, Top):
        return EMPA
    return EMPM


# ---------------------------------------------------------------------------
# Public entry points


def prove_cf(s: Sequent, cfg: CalculusConfig = K.BI, budget: int = 12, options: SearchOptions = SearchOptions()) -> Derivation | None:
    """A cut-free derivation of ``s`` of height at most ``budget``, or None if none was found."""
    if budget < 0:
        raise ValueError("budget must be non-negative")
    return Prover(cfg, options).prove(s, budget)


def cut_eliminate(d: Derivation, cfg: CalculusConfig, budget: int = 12, options: SearchOptions = SearchOptions()) -> Derivation | None:
    """A cut-free derivation with the same conclusion as ``d``, found by search."""
    if d.is_cut_free():
        return d
    return prove_cf(d.conclusion, cfg.without_cut(), budget, options)
