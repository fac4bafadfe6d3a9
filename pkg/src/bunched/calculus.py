"""Derivation trees and the checking kernel for BI, BI+L and BIS4.

Every node stores the witnesses needed to check it syntactically: the
context Π at which a left or structural rule fires, the cut formula, the
index and instantiation of a structural-rule extension.  Bunch equivalence
is never applied implicitly; it needs an explicit ``Equiv`` node.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .bterm import RuleSet, StructRule, subst
from .errors import KernelError
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
    Formula,
    Impl,
    Leaf,
    Or,
    Semi,
    Sep,
    Sequent,
    Wand,
    bunch_equiv,
    bunch_formulas,
    focus,
    has_box,
    unbox_bunch,
)


class Rule(str, enum.Enum):
    AX = "Ax"
    EQUIV = "Equiv"
    WEAKEN_SEMI = "WeakenSemi"
    CONTRACT_SEMI = "ContractSemi"
    CUT = "Cut"
    EMP_R = "EmpR"
    EMP_L = "EmpL"
    SEP_R = "SepR"
    SEP_L = "SepL"
    WAND_R = "WandR"
    WAND_L = "WandL"
    TRUE_R = "TrueR"
    TRUE_L = "TrueL"
    AND_R = "AndR"
    AND_L = "AndL"
    IMPL_R = "ImplR"
    IMPL_L = "ImplL"
    FALSE_L = "FalseL"
    DISJ_R1 = "DisjR1"
    DISJ_R2 = "DisjR2"
    DISJ_L = "DisjL"
    BOX_R = "BoxR"
    BOX_L = "BoxL"
    STRUCT_EXT = "StructExt"

    def __str__(self) -> str:
        return self.value


LEAF_RULES = frozenset({Rule.AX, Rule.EMP_R, Rule.TRUE_R, Rule.FALSE_L})

#: rules whose conclusion is ``Π(sub)`` for a stored context Π
CONTEXT_RULES = frozenset(
    {
        Rule.WEAKEN_SEMI,
        Rule.CONTRACT_SEMI,
        Rule.CUT,
        Rule.EMP_L,
        Rule.SEP_L,
        Rule.WAND_L,
        Rule.TRUE_L,
        Rule.AND_L,
        Rule.IMPL_L,
        Rule.FALSE_L,
        Rule.DISJ_L,
        Rule.BOX_L,
        Rule.STRUCT_EXT,
    }
)


@dataclass(frozen=True)
class CalculusConfig:
    struct_rules: RuleSet = RuleSet()
    s4: bool = False
    cut_allowed: bool = False

    def without_cut(self) -> CalculusConfig:
        return CalculusConfig(self.struct_rules, self.s4, False)


BI = CalculusConfig()
BI_CUT = CalculusConfig(cut_allowed=True)
BIS4 = CalculusConfig(s4=True)


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    conclusion: Sequent
    premises: tuple[Derivation, ...] = ()
    ctx: BunchCtx | None = None
    formula: Formula | None = None  # cut formula
    index: int | None = None  # StructExt rule index
    env: tuple[tuple[int, Bunch], ...] | None = None  # StructExt instantiation
    height: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        h = 0 if not self.premises else 1 + max(p.height for p in self.premises)
        object.__setattr__(self, "height", h)

    @property
    def env_map(self) -> dict[int, Bunch]:
        return dict(self.env or ())

    @property
    def lhs(self) -> Bunch:
        return self.conclusion.lhs

    @property
    def rhs(self) -> Formula:
        return self.conclusion.rhs

    def nodes(self) -> Iterable[Derivation]:
        yield self
        for p in self.premises:
            yield from p.nodes()

    def is_cut_free(self) -> bool:
        return all(n.rule is not Rule.CUT for n in self.nodes())

    def size(self) -> int:
        return sum(1 for _ in self.nodes())


def height(d: Derivation) -> int:
    return d.height


# ---------------------------------------------------------------------------
# Builders.  They compute the conclusion from premises and parameters; only
# the kernel decides whether the result is a valid instance.


def _focus(b: Bunch, ctx: BunchCtx) -> Bunch:
    sub = focus(b, ctx)
    if sub is None:
        raise KernelError("context does not fit the premise", "params.ctx")
    return sub


def ax(atom: Atom | str) -> Derivation:
    if isinstance(atom, str):
        atom = Atom(atom)
    return Derivation(Rule.AX, Sequent(Leaf(atom), atom))


def equiv(premise: Derivation, lhs: Bunch) -> Derivation:
    """Re-express ``premise`` at an equivalent bunch; returns it unchanged when already there."""
    if premise.lhs == lhs:
        return premise
    return Derivation(Rule.EQUIV, Sequent(lhs, premise.rhs), (premise,))


def weaken_semi(premise: Derivation, ctx: BunchCtx, dropped: Bunch) -> Derivation:
    kept = _focus(premise.lhs, ctx)
    return Derivation(Rule.WEAKEN_SEMI, Sequent(ctx.fill(Semi(kept, dropped)), premise.rhs), (premise,), ctx=ctx)


def contract_semi(premise: Derivation, ctx: BunchCtx) -> Derivation:
    doubled = _focus(premise.lhs, ctx)
    if not isinstance(doubled, Semi):
        raise KernelError("contraction premise has no ';' node at the context", "params.ctx")
    return Derivation(Rule.CONTRACT_SEMI, Sequent(ctx.fill(doubled.left), premise.rhs), (premise,), ctx=ctx)


def cut(left: Derivation, right: Derivation, ctx: BunchCtx) -> Derivation:
    a = left.rhs
    return Derivation(Rule.CUT, Sequent(ctx.fill(left.lhs), right.rhs), (left, right), ctx=ctx, formula=a)


def emp_r() -> Derivation:
    return Derivation(Rule.EMP_R, Sequent(EMPM, EMP))


def emp_l(premise: Derivation, ctx: BunchCtx) -> Derivation:
    return Derivation(Rule.EMP_L, Sequent(ctx.fill(Leaf(EMP)), premise.rhs), (premise,), ctx=ctx)


def true_r() -> Derivation:
    return Derivation(Rule.TRUE_R, Sequent(EMPA, TOP))


def true_l(premise: Derivation, ctx: BunchCtx) -> Derivation:
    return Derivation(Rule.TRUE_L, Sequent(ctx.fill(Leaf(TOP)), premise.rhs), (premise,), ctx=ctx)


def false_l(lhs_ctx: BunchCtx, rhs: Formula) -> Derivation:
    return Derivation(Rule.FALSE_L, Sequent(lhs_ctx.fill(Leaf(BOT)), rhs), ctx=lhs_ctx)


def _pair_l(rule: Rule, conn, premise: Derivation, ctx: BunchCtx) -> Derivation:
    node = _focus(premise.lhs, ctx)
    if not (isinstance(node, (Comma, Semi)) and isinstance(node.left, Leaf) and isinstance(node.right, Leaf)):
        raise KernelError("premise does not hold two formulas at the context", "params.ctx")
    principal = conn(node.left.formula, node.right.formula)
    return Derivation(rule, Sequent(ctx.fill(Leaf(principal)), premise.rhs), (premise,), ctx=ctx)


def sep_l(premise: Derivation, ctx: BunchCtx) -> Derivation:
    return _pair_l(Rule.SEP_L, Sep, premise, ctx)


def and_l(premise: Derivation, ctx: BunchCtx) -> Derivation:
    return _pair_l(Rule.AND_L, And, premise, ctx)


def sep_r(left: Derivation, right: Derivation) -> Derivation:
    return Derivation(Rule.SEP_R, Sequent(Comma(left.lhs, right.lhs), Sep(left.rhs, right.rhs)), (left, right))


def and_r(left: Derivation, right: Derivation) -> Derivation:
    return Derivation(Rule.AND_R, Sequent(Semi(left.lhs, right.lhs), And(left.rhs, right.rhs)), (left, right))


def _intro_r(rule: Rule, node_type, conn, premise: Derivation) -> Derivation:
    lhs = premise.lhs
    if not (isinstance(lhs, node_type) and isinstance(lhs.right, Leaf)):
        raise KernelError("premise bunch does not end in the hypothesis", "premises[0]")
    return Derivation(rule, Sequent(lhs.left, conn(lhs.right.formula, premise.rhs)), (premise,))


def wand_r(premise: Derivation) -> Derivation:
    return _intro_r(Rule.WAND_R, Comma, Wand, premise)


def impl_r(premise: Derivation) -> Derivation:
    return _intro_r(Rule.IMPL_R, Semi, Impl, premise)


def _arrow_l(rule: Rule, node_type, conn, minor: Derivation, major: Derivation, ctx: BunchCtx) -> Derivation:
    rest = _focus(major.lhs, ctx)
    if not (isinstance(rest, node_type) and isinstance(rest.right, Leaf)):
        raise KernelError("major premise does not hold the consequent at the context", "params.ctx")
    principal = Leaf(conn(minor.rhs, rest.right.formula))
    lhs = ctx.fill(node_type(node_type(minor.lhs, rest.left), principal))
    return Derivation(rule, Sequent(lhs, major.rhs), (minor, major), ctx=ctx)


def wand_l(minor: Derivation, major: Derivation, ctx: BunchCtx) -> Derivation:
    """``Π((Δ1 , Δ2) , φ -* ψ) ⊢ χ`` from ``Δ1 ⊢ φ`` and ``Π(Δ2 , ψ) ⊢ χ``."""
    return _arrow_l(Rule.WAND_L, Comma, Wand, minor, major, ctx)


def impl_l(minor: Derivation, major: Derivation, ctx: BunchCtx) -> Derivation:
    """``Π((Δ1 ; Δ2) ; φ -> ψ) ⊢ χ`` from ``Δ1 ⊢ φ`` and ``Π(Δ2 ; ψ) ⊢ χ``."""
    return _arrow_l(Rule.IMPL_L, Semi, Impl, minor, major, ctx)


def disj_r1(premise: Derivation, other: Formula) -> Derivation:
    return Derivation(Rule.DISJ_R1, Sequent(premise.lhs, Or(premise.rhs, other)), (premise,))


def disj_r2(premise: Derivation, other: Formula) -> Derivation:
    return Derivation(Rule.DISJ_R2, Sequent(premise.lhs, Or(other, premise.rhs)), (premise,))


def disj_l(left: Derivation, right: Derivation, ctx: BunchCtx) -> Derivation:
    a, b = _focus(left.lhs, ctx), _focus(right.lhs, ctx)
    if not (isinstance(a, Leaf) and isinstance(b, Leaf)):
        raise KernelError("premises do not hold formulas at the context", "params.ctx")
    return Derivation(Rule.DISJ_L, Sequent(ctx.fill(Leaf(Or(a.formula, b.formula))), left.rhs), (left, right), ctx=ctx)


def box_r(premise: Derivation) -> Derivation:
    return Derivation(Rule.BOX_R, Sequent(premise.lhs, Box(premise.rhs)), (premise,))


def box_l(premise: Derivation, ctx: BunchCtx) -> Derivation:
    a = _focus(premise.lhs, ctx)
    if not isinstance(a, Leaf):
        raise KernelError("premise does not hold a formula at the context", "params.ctx")
    return Derivation(Rule.BOX_L, Sequent(ctx.fill(Leaf(Box(a.formula))), premise.rhs), (premise,), ctx=ctx)


def struct_ext(
    premises: Iterable[Derivation], rhs: Formula, ctx: BunchCtx, index: int, rule: StructRule, env: Mapping[int, Bunch]
) -> Derivation:
    env_t = tuple(sorted(env.items()))
    lhs = ctx.fill(subst(rule.conclusion, env))
    return Derivation(Rule.STRUCT_EXT, Sequent(lhs, rhs), tuple(premises), ctx=ctx, index=index, env=env_t)


# ---------------------------------------------------------------------------
# Kernel


def _require(cond: bool, message: str, where: str | None = None):
    if not cond:
        raise KernelError(message, where)


def _arity(d: Derivation, n: int):
    _require(len(d.premises) == n, f"{d.rule} expects {n} premise(s), got {len(d.premises)}", "premises")


def _premise_is(d: Derivation, i: int, expected: Sequent):
    got = d.premises[i].conclusion
    _require(got == expected, f"expected {expected}, got {got}", f"premises[{i}]")


def _sub(d: Derivation) -> Bunch:
    _require(d.ctx is not None, f"{d.rule} needs a context", "params.ctx")
    sub = focus(d.lhs, d.ctx)
    _require(sub is not None, "context does not fit the conclusion", "params.ctx")
    return sub


def check_node(d: Derivation, cfg: CalculusConfig) -> None:
    """Raise :class:`KernelError` unless ``d`` is an instance of its rule under ``cfg``.

    Premises are not checked recursively.
    """
    r = d.rule
    if r is Rule.CUT and not cfg.cut_allowed:
        raise KernelError("illegal rule: Cut is not allowed in this calculus", "rule")
    if r in (Rule.BOX_R, Rule.BOX_L) and not cfg.s4:
        raise KernelError(f"illegal rule: {r} needs the S4 calculus", "rule")
    if not cfg.s4:
        boxed = has_box(d.rhs) or any(has_box(f) for f in bunch_formulas(d.lhs))
        _require(not boxed, "box formula outside the S4 calculus", "conclusion")
    if r not in CONTEXT_RULES:
        _require(d.ctx is None, f"{r} takes no context", "params.ctx")
    _require(r is Rule.CUT or d.formula is None, f"{r} takes no cut formula", "params.formula")
    _require(r is Rule.STRUCT_EXT or (d.index is None and d.env is None), f"{r} takes no instantiation", "params")
    rhs = d.rhs

    if r is Rule.AX:
        _arity(d, 0)
        _require(isinstance(rhs, Atom) and d.lhs == Leaf(rhs), "axiom needs 'a |- a' for an atom a", "conclusion")
    elif r is Rule.EQUIV:
        _arity(d, 1)
        p = d.premises[0].conclusion
        _require(p.rhs == rhs, "right-hand sides differ", "premises[0]")
        _require(bunch_equiv(p.lhs, d.lhs), f"{p.lhs} is not equivalent to {d.lhs}", "premises[0]")
    elif r is Rule.WEAKEN_SEMI:
        _arity(d, 1)
        sub = _sub(d)
        _require(isinstance(sub, Semi), "no ';' node at the context", "params.ctx")
        _premise_is(d, 0, Sequent(d.ctx.fill(sub.left), rhs))
    elif r is Rule.CONTRACT_SEMI:
        _arity(d, 1)
        sub = _sub(d)
        _premise_is(d, 0, Sequent(d.ctx.fill(Semi(sub, sub)), rhs))
    elif r is Rule.CUT:
        _arity(d, 2)
        _require(d.formula is not None, "cut needs a formula", "params.formula")
        sub = _sub(d)
        _premise_is(d, 0, Sequent(sub, d.formula))
        _premise_is(d, 1, Sequent(d.ctx.fill(Leaf(d.formula)), rhs))
    elif r is Rule.EMP_R:
        _arity(d, 0)
        _require(d.conclusion == Sequent(EMPM, EMP), "needs 'empm |- emp'", "conclusion")
    elif r is Rule.TRUE_R:
        _arity(d, 0)
        _require(d.conclusion == Sequent(EMPA, TOP), "needs 'empa |- top'", "conclusion")
    elif r in (Rule.EMP_L, Rule.TRUE_L):
        _arity(d, 1)
        unit_f, unit_b = (EMP, EMPM) if r is Rule.EMP_L else (TOP, EMPA)
        _require(_sub(d) == Leaf(unit_f), f"no {unit_f} at the context", "params.ctx")
        _premise_is(d, 0, Sequent(d.ctx.fill(unit_b), rhs))
    elif r in (Rule.SEP_R, Rule.AND_R):
        _arity(d, 2)
        node, conn = (Comma, Sep) if r is Rule.SEP_R else (Semi, And)
        _require(isinstance(d.lhs, node), f"bunch is not a {'comma' if node is Comma else 'semicolon'} node", "conclusion")
        _require(isinstance(rhs, conn), f"goal is not a {conn.__name__}", "conclusion")
        _premise_is(d, 0, Sequent(d.lhs.left, rhs.left))
        _premise_is(d, 1, Sequent(d.lhs.right, rhs.right))
    elif r in (Rule.SEP_L, Rule.AND_L):
        _arity(d, 1)
        node, conn = (Comma, Sep) if r is Rule.SEP_L else (Semi, And)
        sub = _sub(d)
        _require(isinstance(sub, Leaf) and isinstance(sub.formula, conn), f"no {conn.__name__} at the context", "params.ctx")
        _premise_is(d, 0, Sequent(d.ctx.fill(node(Leaf(sub.formula.left), Leaf(sub.formula.right))), rhs))
    elif r in (Rule.WAND_R, Rule.IMPL_R):
        _arity(d, 1)
        node, conn = (Comma, Wand) if r is Rule.WAND_R else (Semi, Impl)
        _require(isinstance(rhs, conn), f"goal is not a {conn.__name__}", "conclusion")
        _premise_is(d, 0, Sequent(node(d.lhs, Leaf(rhs.left)), rhs.right))
    elif r in (Rule.WAND_L, Rule.IMPL_L):
        _arity(d, 2)
        node, conn = (Comma, Wand) if r is Rule.WAND_L else (Semi, Impl)
        sub = _sub(d)
        ok = (
            isinstance(sub, node)
            and isinstance(sub.left, node)
            and isinstance(sub.right, Leaf)
            and isinstance(sub.right.formula, conn)
        )
        _require(ok, f"context does not hold '(Δ1 {node is Comma and ',' or ';'} Δ2) {node is Comma and ',' or ';'} {conn.__name__}'", "params.ctx")
        principal = sub.right.formula
        _premise_is(d, 0, Sequent(sub.left.left, principal.left))
        _premise_is(d, 1, Sequent(d.ctx.fill(node(sub.left.right, Leaf(principal.right))), rhs))
    elif r is Rule.FALSE_L:
        _arity(d, 0)
        _require(_sub(d) == Leaf(BOT), "no bot at the context", "params.ctx")
    elif r in (Rule.DISJ_R1, Rule.DISJ_R2):
        _arity(d, 1)
        _require(isinstance(rhs, Or), "goal is not a disjunction", "conclusion")
        _premise_is(d, 0, Sequent(d.lhs, rhs.left if r is Rule.DISJ_R1 else rhs.right))
    elif r is Rule.DISJ_L:
        _arity(d, 2)
        sub = _sub(d)
        _require(isinstance(sub, Leaf) and isinstance(sub.formula, Or), "no disjunction at the context", "params.ctx")
        _premise_is(d, 0, Sequent(d.ctx.fill(Leaf(sub.formula.left)), rhs))
        _premise_is(d, 1, Sequent(d.ctx.fill(Leaf(sub.formula.right)), rhs))
    elif r is Rule.BOX_R:
        _arity(d, 1)
        _require(isinstance(rhs, Box), "goal is not boxed", "conclusion")
        _require(unbox_bunch(d.lhs) is not None, "bunch is not fully boxed", "conclusion")
        _premise_is(d, 0, Sequent(d.lhs, rhs.body))
    elif r is Rule.BOX_L:
        _arity(d, 1)
        sub = _sub(d)
        _require(isinstance(sub, Leaf) and isinstance(sub.formula, Box), "no boxed formula at the context", "params.ctx")
        _premise_is(d, 0, Sequent(d.ctx.fill(Leaf(sub.formula.body)), rhs))
    elif r is Rule.STRUCT_EXT:
        i = d.index
        _require(i is not None and 0 <= i < len(cfg.struct_rules), f"illegal rule: no structural rule #{i}", "params.index")
        rule = cfg.struct_rules[i]
        env = d.env_map
        missing = set(rule.variables()) - set(env)
        _require(not missing, f"instantiation misses x{min(missing) if missing else ''}", "params.env")
        _require(_sub(d) == subst(rule.conclusion, env), "context does not hold the instantiated conclusion term", "params.ctx")
        _arity(d, len(rule.premises))
        for k, t in enumerate(rule.premises):
            _premise_is(d, k, Sequent(d.ctx.fill(subst(t, env)), rhs))
    else:  # pragma: no cover
        raise KernelError(f"unknown rule {r!r}", "rule")


@dataclass(frozen=True)
class Verdict:
    ok: bool
    path: tuple[int, ...] = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "accepted"
        where = "/".join(map(str, self.path)) or "root"
        return f"rejected at {where}: {self.message}"


def check_derivation(d: Derivation, cfg: CalculusConfig) -> Verdict:
    """Check every node, premises first; report the first failing node by its premise-index path."""
    stack: list[tuple[Derivation, tuple[int, ...], bool]] = [(d, (), False)]
    while stack:
        node, path, expanded = stack.pop()
        if not expanded:
            stack.append((node, path, True))
            for i in reversed(range(len(node.premises))):
                stack.append((node.premises[i], path + (i,), False))
            continue
        expected_h = 0 if not node.premises else 1 + max(p.height for p in node.premises)
        if node.height != expected_h:
            return Verdict(False, path, f"height {node.height} inconsistent with premises")
        try:
            check_node(node, cfg)
        except KernelError as e:
            return Verdict(False, path, f"{node.rule}: {e}")
    return Verdict(True)
