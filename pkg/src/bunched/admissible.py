"""Admissible rules as derivation transformers.

Each function takes cut-free derivations and returns new ones; the kernel is
the judge of the outputs.  The left inversions (sepL, andL, trueL, empL and
single-leaf box idempotence) share one engine, :func:`replace_leaf`, that
pushes the replacement of a formula leaf up through the derivation.
"""

from __future__ import annotations

from typing import Callable

from . import calculus as K
from .bterm import RuleSet, Var, bterm_ctx_act_decomp, occurrence_contexts
from .calculus import Derivation, Rule
from .errors import MalformedInput
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
    CommaR,
    Formula,
    Frame,
    Impl,
    InsideOuter,
    Leaf,
    Or,
    Semi,
    SemiL,
    SemiR,
    Sep,
    Sequent,
    Wand,
    box_bunch,
    bunch_equiv,
    bunch_to_formula,
    focus,
    formula_positions,
    locate_in_filled,
    unbox_bunch,
    unbox_decompose,
)

IDENTITY = BunchCtx()


# ---------------------------------------------------------------------------
# Identity expansion


def identity_expansion(phi: Formula, s4: bool = False) -> Derivation:
    """Cut-free derivation of ``phi |- phi``, by recursion on ``phi``."""
    if isinstance(phi, Atom):
        return K.ax(phi)
    if phi == TOP:
        return K.true_l(K.true_r(), IDENTITY)
    if phi == BOT:
        return K.false_l(IDENTITY, BOT)
    if phi == EMP:
        return K.emp_l(K.emp_r(), IDENTITY)
    if isinstance(phi, Box):
        if not s4:
            raise MalformedInput("identity expansion of a box formula needs the S4 calculus")
        body = identity_expansion(phi.body, s4)
        return K.box_r(K.box_l(body, IDENTITY))
    a, b = identity_expansion(phi.left, s4), identity_expansion(phi.right, s4)
    if isinstance(phi, Sep):
        return K.sep_l(K.sep_r(a, b), IDENTITY)
    if isinstance(phi, And):
        return K.and_l(K.and_r(a, b), IDENTITY)
    if isinstance(phi, Or):
        return K.disj_l(K.disj_r1(a, phi.right), K.disj_r2(b, phi.left), IDENTITY)
    # φ -* ψ, φ ⊢ ψ via ((φ , ∅m) , φ -* ψ), and the additive analogue
    if isinstance(phi, Wand):
        node, unit, left_rule, right_rule = Comma, EMPM, K.wand_l, K.wand_r
    elif isinstance(phi, Impl):
        node, unit, left_rule, right_rule = Semi, EMPA, K.impl_l, K.impl_r
    else:  # pragma: no cover
        raise MalformedInput(f"unknown formula {phi!r}")
    major = K.equiv(b, node(unit, Leaf(phi.right)))
    applied = left_rule(a, major, IDENTITY)
    return right_rule(K.equiv(applied, node(Leaf(phi), Leaf(phi.left))))


# ---------------------------------------------------------------------------
# Shared structure of context rules


def _contextual(d: Derivation) -> tuple[Bunch, list[tuple[int, Bunch]]]:
    """For a rule firing at ``d.ctx``: the active sub-bunch and, per premise stated in the same context, its sub-bunch."""
    sub = focus(d.lhs, d.ctx)
    r = d.rule
    if r is Rule.WEAKEN_SEMI:
        return sub, [(0, sub.left)]
    if r is Rule.CONTRACT_SEMI:
        return sub, [(0, Semi(sub, sub))]
    if r is Rule.CUT:
        return sub, [(1, Leaf(d.formula))]
    if r is Rule.FALSE_L:
        return sub, []
    if r in (Rule.WAND_L, Rule.IMPL_L):
        node = Comma if r is Rule.WAND_L else Semi
        return sub, [(1, node(sub.left.right, Leaf(sub.right.formula.right)))]
    if r is Rule.STRUCT_EXT:
        return sub, [(k, focus(p.lhs, d.ctx)) for k, p in enumerate(d.premises)]
    # single-leaf left rules: the premises tell us their sub-bunches
    return sub, [(k, focus(p.lhs, d.ctx)) for k, p in enumerate(d.premises)]


def _rebuild(d: Derivation, ctx: BunchCtx, sub: Bunch, premises: list[Derivation] | tuple, rhs: Formula | None = None) -> Derivation:
    """Same rule and parameters as ``d``, firing at ``ctx`` on ``sub``."""
    rhs = d.rhs if rhs is None else rhs
    return Derivation(
        d.rule, Sequent(ctx.fill(sub), rhs), tuple(premises), ctx=ctx, formula=d.formula, index=d.index, env=d.env
    )


def _linearize(t, var: int, start: int):
    """Rename every occurrence of ``var`` in ``t`` to fresh indices ``start, start+1, ...``."""
    counter = [start]

    def go(u):
        if isinstance(u, Var):
            if u.index == var:
                counter[0] += 1
                return Var(counter[0] - 1)
            return u
        return type(u)(go(u.left), go(u.right))

    out = go(t)
    return out, list(range(start, counter[0]))


# ---------------------------------------------------------------------------
# The leaf-replacement engine

_MARK = Atom("⋄")  # cannot be written in the concrete syntax


class _LeafReplacer:
    """Replaces one formula leaf by a bunch throughout a derivation.

    ``principal`` is the left rule whose premise at the leaf is exactly the
    replaced bunch; where the derivation applies it to this very leaf the
    premise is returned.
    """

    def __init__(self, target: Formula, repl: Bunch, principal: Rule, rules: RuleSet):
        self.target = target
        self.repl = repl
        self.principal = principal
        self.rules = rules

    def run(self, d: Derivation, ctx: BunchCtx) -> Derivation:
        target, repl, r = self.target, self.repl, d.rule
        if r is self.principal and d.ctx == ctx:
            return d.premises[0]

        if r in K.CONTEXT_RULES:
            c = d.ctx
            sub, ctx_premises = _contextual(d)
            where = locate_in_filled(c, sub, target, ctx)
            if isinstance(where, InsideOuter):
                premises = list(d.premises)
                for k, sub_k in ctx_premises:
                    premises[k] = self.run(premises[k], where.pi0(sub_k))
                return _rebuild(d, where.pi1(repl), sub, premises)
            return self.inside(d, c, sub, where.ctx0)

        if r is Rule.EQUIV:
            p = d.premises[0]
            marked = ctx.fill(Leaf(_MARK))
            for c2, f in formula_positions(p.lhs):
                if f == target and bunch_equiv(c2.fill(Leaf(_MARK)), marked):
                    return K.equiv(self.run(p, c2), ctx.fill(repl))
            raise MalformedInput("no matching leaf across the equivalence")  # pragma: no cover
        if r in (Rule.SEP_R, Rule.AND_R):
            first, rest = ctx.frames[0], BunchCtx(ctx.frames[1:])
            left, right = d.premises
            if first.hole_left:
                left = self.run(left, rest)
            else:
                right = self.run(right, rest)
            return (K.sep_r if r is Rule.SEP_R else K.and_r)(left, right)
        if r in (Rule.WAND_R, Rule.IMPL_R):
            frame = CommaR if r is Rule.WAND_R else SemiR
            p = self.run(d.premises[0], BunchCtx((frame(Leaf(d.rhs.left)),) + ctx.frames))
            return (K.wand_r if r is Rule.WAND_R else K.impl_r)(p)
        if r in (Rule.DISJ_R1, Rule.DISJ_R2):
            p = self.run(d.premises[0], ctx)
            if r is Rule.DISJ_R1:
                return K.disj_r1(p, d.rhs.right)
            return K.disj_r2(p, d.rhs.left)
        if r is Rule.BOX_R:
            boxed = d.lhs
            # the boxed leaf sits at ctx in □Δ; Π′ locates it in Δ (sanity check of the shape)
            if isinstance(target, Box):
                unbox_decompose(boxed, ctx, target.body)
            p = self.run(d.premises[0], ctx)
            if unbox_bunch(p.lhs) is None:
                raise MalformedInput("replacement would leave the boxed bunch")
            return K.box_r(p)
        # Ax, EmpR and TrueR have no formula leaf besides their own
        raise MalformedInput(f"{r} cannot host {target} at the given position")

    def inside(self, d: Derivation, c: BunchCtx, sub: Bunch, inner: BunchCtx) -> Derivation:
        """The target sits inside the sub-bunch the rule acts on, at ``inner``."""
        r, repl = d.rule, self.repl
        if r is Rule.WEAKEN_SEMI:
            first, rest = inner.frames[0], BunchCtx(inner.frames[1:])
            if first.hole_left:
                return K.weaken_semi(self.run(d.premises[0], c + rest), c, sub.right)
            return K.weaken_semi(d.premises[0], c, rest.fill(repl))
        if r is Rule.CONTRACT_SEMI:
            # both copies carry the target: the hypothesis is used twice
            p = self.run(d.premises[0], c.then(SemiR(sub)) + inner)
            p = self.run(p, c.then(SemiL(inner.fill(repl))) + inner)
            return K.contract_semi(p, c)
        if r is Rule.CUT:
            return K.cut(self.run(d.premises[0], inner), d.premises[1], c)
        if r in (Rule.WAND_L, Rule.IMPL_L):
            frame = CommaR if r is Rule.WAND_L else SemiR
            minor, major = d.premises
            if not inner.frames or not inner.frames[0].hole_left:
                raise MalformedInput(f"{r} acts on {self.target} itself")
            f1, rest = inner.frames[1], BunchCtx(inner.frames[2:])
            if f1.hole_left:
                minor = self.run(minor, rest)
            else:
                major = self.run(major, c.then(frame(Leaf(sub.right.formula.right))) + rest)
            return (K.wand_l if r is Rule.WAND_L else K.impl_l)(minor, major, c)
        if r is Rule.STRUCT_EXT:
            return self.inside_struct(d, c, inner)
        raise MalformedInput(f"{r} acts on {self.target} itself")

    def inside_struct(self, d: Derivation, c: BunchCtx, inner: BunchCtx) -> Derivation:
        # the conclusion term is linear, so the target lies in exactly one variable
        rule = self.rules[d.index]
        env = d.env_map
        j, inner_j = bterm_ctx_act_decomp(rule.conclusion, env, inner, self.target)
        new_value = inner_j.fill(self.repl)
        fresh = max(env) + 1
        premises = []
        for term, p in zip(rule.premises, d.premises):
            # each occurrence of x_j in the premise term gets its own fresh name
            lin, names = _linearize(term, j, fresh)
            env_k = dict(env)
            env_k.update({n: env[j] for n in names})
            for n in names:
                (occ,) = occurrence_contexts(lin, env_k, n)
                p = self.run(p, c + occ + inner_j)
                env_k[n] = new_value
            premises.append(p)
        new_env = dict(env)
        new_env[j] = new_value
        return K.struct_ext(premises, d.rhs, c, d.index, rule, new_env)


def replace_leaf(
    d: Derivation, ctx: BunchCtx, target: Formula, replacement: Bunch, principal: Rule, rules: RuleSet = RuleSet()
) -> Derivation:
    """Turn a derivation of ``ctx(target) |- χ`` into one of ``ctx(replacement) |- χ``."""
    if d.lhs != ctx.fill(Leaf(target)):
        raise MalformedInput(f"context does not address {target} in {d.lhs}")
    return _LeafReplacer(target, replacement, principal, rules).run(d, ctx)


def _principal_at(d: Derivation, ctx: BunchCtx, shape: type) -> Formula:
    sub = focus(d.lhs, ctx)
    if sub is None:
        raise MalformedInput("context does not fit the conclusion")
    if not (isinstance(sub, Leaf) and isinstance(sub.formula, shape)):
        raise MalformedInput(f"no {shape.__name__} formula at the context (found {sub})")
    return sub.formula


def invert_sep_l(d: Derivation, ctx: BunchCtx, rules: RuleSet = RuleSet()) -> Derivation:
    """``Π(φ * ψ) |- χ``  to  ``Π(φ , ψ) |- χ``."""
    f = _principal_at(d, ctx, Sep)
    return replace_leaf(d, ctx, f, Comma(Leaf(f.left), Leaf(f.right)), Rule.SEP_L, rules)


def invert_and_l(d: Derivation, ctx: BunchCtx, rules: RuleSet = RuleSet()) -> Derivation:
    """``Π(φ /\\ ψ) |- χ``  to  ``Π(φ ; ψ) |- χ``."""
    f = _principal_at(d, ctx, And)
    return replace_leaf(d, ctx, f, Semi(Leaf(f.left), Leaf(f.right)), Rule.AND_L, rules)


def invert_true_l(d: Derivation, ctx: BunchCtx, rules: RuleSet = RuleSet()) -> Derivation:
    f = _principal_at(d, ctx, type(TOP))
    return replace_leaf(d, ctx, f, EMPA, Rule.TRUE_L, rules)


def invert_emp_l(d: Derivation, ctx: BunchCtx, rules: RuleSet = RuleSet()) -> Derivation:
    f = _principal_at(d, ctx, type(EMP))
    return replace_leaf(d, ctx, f, EMPM, Rule.EMP_L, rules)


def collapse_inv(d: Derivation, ctx: BunchCtx, delta: Bunch, rules: RuleSet = RuleSet()) -> Derivation:
    """``Π(⌊Δ⌋) |- χ``  to  ``Π(Δ) |- χ``, by recursion on Δ."""
    if d.lhs != ctx.fill(Leaf(bunch_to_formula(delta))):
        raise MalformedInput("context does not hold the collapse of the bunch")
    if isinstance(delta, Leaf):
        return d
    if delta == EMPM:
        return invert_emp_l(d, ctx, rules)
    if delta == EMPA:
        return invert_true_l(d, ctx, rules)
    invert, right_frame, left_frame = (
        (invert_sep_l, CommaR, lambda b: Frame(",", False, b))
        if isinstance(delta, Comma)
        else (invert_and_l, SemiR, SemiL)
    )
    d = invert(d, ctx, rules)
    right_leaf = Leaf(bunch_to_formula(delta.right))
    d = collapse_inv(d, ctx.then(right_frame(right_leaf)), delta.left, rules)
    return collapse_inv(d, ctx.then(left_frame(delta.left)), delta.right, rules)


def box_idemp_leaf(d: Derivation, ctx: BunchCtx, rules: RuleSet = RuleSet()) -> Derivation:
    """``Π(□□φ) |- χ``  to  ``Π(□φ) |- χ``."""
    f = _principal_at(d, ctx, Box)
    if not isinstance(f.body, Box):
        raise MalformedInput(f"{f} is not doubly boxed")
    return replace_leaf(d, ctx, f, Leaf(f.body), Rule.BOX_L, rules)


def box_idemp_inv(d: Derivation, ctx: BunchCtx, delta: Bunch, rules: RuleSet = RuleSet()) -> Derivation:
    """``Γ(□□Δ) |- φ``  to  ``Γ(□Δ) |- φ``, one leaf of Δ at a time."""
    if focus(d.lhs, ctx) != box_bunch(box_bunch(delta)):
        raise MalformedInput("position does not hold the doubly boxed bunch")
    n = len(formula_positions(delta))
    for k in range(n):
        pos, _ = formula_positions(focus(d.lhs, ctx))[k]
        d = box_idemp_leaf(d, ctx + pos, rules)
    return d


def _extend_right(d: Derivation, node_type, hyp: Formula, intro: Rule, body: Formula) -> Derivation:
    """Derivation of ``node(Δ, hyp) |- body`` from one of ``Δ |- hyp ⇒ body``."""
    r = d.rule
    if r is intro:
        return d.premises[0]
    frame = CommaR if node_type is Comma else SemiR
    again = lambda p: _extend_right(p, node_type, hyp, intro, body)  # noqa: E731
    if r is Rule.EQUIV:
        p = again(d.premises[0])
        return K.equiv(p, node_type(d.lhs, Leaf(hyp)))
    if r in K.CONTEXT_RULES:
        sub, ctx_premises = _contextual(d)
        premises = list(d.premises)
        for k, _ in ctx_premises:
            premises[k] = again(premises[k])
        new_ctx = BunchCtx((frame(Leaf(hyp)),) + d.ctx.frames)
        return _rebuild(d, new_ctx, sub, premises, rhs=body)
    raise MalformedInput(f"{r} cannot conclude {d.rhs}")


def invert_wand_r(d: Derivation) -> Derivation:
    """``Δ |- φ -* ψ``  to  ``Δ , φ |- ψ``."""
    if not isinstance(d.rhs, Wand):
        raise MalformedInput(f"goal {d.rhs} is not a wand")
    return _extend_right(d, Comma, d.rhs.left, Rule.WAND_R, d.rhs.right)


def invert_impl_r(d: Derivation) -> Derivation:
    """``Δ |- φ -> ψ``  to  ``Δ ; φ |- ψ``."""
    if not isinstance(d.rhs, Impl):
        raise MalformedInput(f"goal {d.rhs} is not an implication")
    return _extend_right(d, Semi, d.rhs.left, Rule.IMPL_R, d.rhs.right)


_INVERSIONS: dict[type, Callable] = {Sep: invert_sep_l, And: invert_and_l, type(TOP): invert_true_l, type(EMP): invert_emp_l}


def invert_all(d: Derivation, shape: type, rules: RuleSet = RuleSet()) -> Derivation:
    """Apply the left inversion for ``shape`` until no such formula is left in the bunch."""
    invert = _INVERSIONS[shape]
    while True:
        hits = [c for c, f in formula_positions(d.lhs) if isinstance(f, shape)]
        if not hits:
            return d
        d = invert(d, hits[0], rules)


INVERSION_NAMES = {
    "sepL": invert_sep_l,
    "andL": invert_and_l,
    "trueL": invert_true_l,
    "empL": invert_emp_l,
    "boxIdemp": box_idemp_leaf,
}
