"""Bunched terms and simple structural rules.

A simple structural rule ``(premises, conclusion)`` with bunched terms over
variables ``x1, x2, ...`` licenses, at any position Π of a bunch::

    Π(T1[Δ⃗]) ⊢ φ   ...   Π(Tm[Δ⃗]) ⊢ φ
    ---------------------------------
            Π(T[Δ⃗]) ⊢ φ

The conclusion term ``T`` must be linear.  Rule files hold one rule per line,
``T1 & T2 => T``; ``=> T`` is a rule without premises.
"""

from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

from .errors import MalformedInput, ParseError
from .syntax import Bunch, BunchCtx, Comma, Formula, Frame, Leaf, Semi


@dataclass(frozen=True, slots=True)
class Var:
    index: int

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True, slots=True)
class TComma:
    left: BTerm
    right: BTerm

    def __str__(self) -> str:
        return show_bterm(self)


@dataclass(frozen=True, slots=True)
class TSemi:
    left: BTerm
    right: BTerm

    def __str__(self) -> str:
        return show_bterm(self)


BTerm = Union[Var, TComma, TSemi]


def show_bterm(t: BTerm) -> str:
    if isinstance(t, Var):
        return str(t)
    left, right = show_bterm(t.left), show_bterm(t.right)
    if isinstance(t, TSemi):
        if isinstance(t.right, TSemi):
            right = f"({right})"
        return f"{left} ; {right}"
    if isinstance(t.left, TSemi):
        left = f"({left})"
    if not isinstance(t.right, Var):
        right = f"({right})"
    return f"{left} , {right}"


def variables(t: BTerm) -> list[int]:
    """Variable indices in left-to-right order, with repetitions."""
    if isinstance(t, Var):
        return [t.index]
    return variables(t.left) + variables(t.right)


def is_linear(t: BTerm) -> bool:
    vs = variables(t)
    return len(vs) == len(set(vs))


def subst(t: BTerm, env: Mapping[int, Bunch]) -> Bunch:
    if isinstance(t, Var):
        try:
            return env[t.index]
        except KeyError:
            raise MalformedInput(f"unbound variable x{t.index}") from None
    node = Comma if isinstance(t, TComma) else Semi
    return node(subst(t.left, env), subst(t.right, env))


def occurrence_contexts(t: BTerm, env: Mapping[int, Bunch], index: int) -> list[BunchCtx]:
    """Contexts, inside ``subst(t, env)``, of every occurrence of variable ``index``."""
    if isinstance(t, Var):
        return [BunchCtx()] if t.index == index else []
    op = "," if isinstance(t, TComma) else ";"
    out = []
    right = subst(t.right, env)
    for c in occurrence_contexts(t.left, env, index):
        out.append(BunchCtx((Frame(op, True, right),) + c.frames))
    left = subst(t.left, env)
    for c in occurrence_contexts(t.right, env, index):
        out.append(BunchCtx((Frame(op, False, left),) + c.frames))
    return out


def interp_bterm(t: BTerm, alg, env: Mapping[int, object]):
    """Evaluate ``t`` in a BI algebra: ``,`` as sep and ``;`` as meet."""
    if isinstance(t, Var):
        try:
            return env[t.index]
        except KeyError:
            raise MalformedInput(f"unbound variable x{t.index}") from None
    left, right = interp_bterm(t.left, alg, env), interp_bterm(t.right, alg, env)
    return alg.sep(left, right) if isinstance(t, TComma) else alg.meet(left, right)


@dataclass(frozen=True, slots=True)
class StructRule:
    premises: tuple[BTerm, ...]
    conclusion: BTerm

    def __post_init__(self):
        if not is_linear(self.conclusion):
            raise MalformedInput(f"conclusion {show_bterm(self.conclusion)} of a structural rule must be linear")
        missing = set(self.variables()) - set(variables(self.conclusion))
        if missing:
            # the instantiation must then supply these explicitly
            warnings.warn(
                f"rule {self}: premise variables {sorted(missing)} do not occur in the conclusion",
                stacklevel=3,
            )

    def variables(self) -> list[int]:
        seen = dict.fromkeys(variables(self.conclusion))
        for p in self.premises:
            seen.update(dict.fromkeys(variables(p)))
        return list(seen)

    def __str__(self) -> str:
        return " & ".join(show_bterm(p) for p in self.premises) + (" " if self.premises else "") + "=> " + show_bterm(self.conclusion)


@dataclass(frozen=True, slots=True)
class RuleSet:
    rules: tuple[StructRule, ...] = ()

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[StructRule]:
        return iter(self.rules)

    def __getitem__(self, i: int) -> StructRule:
        return self.rules[i]

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules)


#: affine weakening for ",":  Π(Δ1) ⊢ φ  gives  Π(Δ1 , Δ2) ⊢ φ
AFFINE = StructRule((Var(1),), TComma(Var(1), Var(2)))


def validates_rule(alg, rule: StructRule) -> bool:
    """Whether ``⟦T⟧(a⃗) ≤ ⟦T1⟧(a⃗) ∨ ... ∨ ⟦Tm⟧(a⃗)`` for every assignment into the carrier."""
    return find_rule_violation(alg, rule) is None


def find_rule_violation(alg, rule: StructRule) -> dict[int, object] | None:
    vs = rule.variables()
    carrier = list(alg.elements())
    for values in itertools.product(carrier, repeat=len(vs)):
        env = dict(zip(vs, values))
        rhs = alg.bot
        for p in rule.premises:
            rhs = alg.join(rhs, interp_bterm(p, alg, env))
        if not alg.leq(interp_bterm(rule.conclusion, alg, env), rhs):
            return env
    return None


def bterm_ctx_act_decomp(t: BTerm, env: Mapping[int, Bunch], ctx: BunchCtx, target: Formula) -> tuple[int, BunchCtx]:
    """Locate a formula leaf of ``subst(t, env)`` inside one instantiated variable.

    Returns ``(j, Π′)`` with ``env[j] == Π′(target)`` and, for every Γ,
    ``subst(t, env | {j: Π′(Γ)}) == ctx(Γ)``.
    """
    if not is_linear(t):
        raise MalformedInput("bterm_ctx_act_decomp needs a linear term")
    if subst(t, env) != ctx.fill(Leaf(target)):
        raise MalformedInput("bterm_ctx_act_decomp: context does not address the instantiated term")
    frames = ctx.frames
    i = 0
    while not isinstance(t, Var):
        # fill(ctx, leaf) == subst(t, env) forces a frame here with the matching connective
        frame = frames[i]
        t = t.left if frame.hole_left else t.right
        i += 1
    return t.index, BunchCtx(frames[i:])


# ---------------------------------------------------------------------------
# Rule-file syntax

_BT_TOKEN = re.compile(r"\s*(?:(x\d+)|([(),;]))")


def parse_bterm(text: str) -> BTerm:
    tokens: list[tuple[str, int]] = []
    pos = 0
    while True:
        m = _BT_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:]
            if rest.strip():
                col = pos + len(rest) - len(rest.lstrip()) + 1
                raise ParseError(f"unexpected {rest.strip()[0]!r}", 1, col, frozenset({"x<n>", "(", ",", ";", ")"}))
            tokens.append(("EOF", len(text) + 1))
            break
        tokens.append((m.group(1) or m.group(2), m.start(1) if m.group(1) else m.start(2)))
        pos = m.end()

    i = 0

    def fail(expected):
        tok, col = tokens[i]
        raise ParseError(f"unexpected {'end of input' if tok == 'EOF' else repr(tok)}", 1, col + (tok != "EOF"), frozenset(expected))

    def semi():
        nonlocal i
        t = comma()
        while tokens[i][0] == ";":
            i += 1
            t = TSemi(t, comma())
        return t

    def comma():
        nonlocal i
        t = item()
        while tokens[i][0] == ",":
            i += 1
            t = TComma(t, item())
        return t

    def item():
        nonlocal i
        tok = tokens[i][0]
        if tok == "(":
            i += 1
            t = semi()
            if tokens[i][0] != ")":
                fail({")"})
            i += 1
            return t
        if tok.startswith("x"):
            i += 1
            return Var(int(tok[1:]))
        fail({"x<n>", "("})

    t = semi()
    if tokens[i][0] != "EOF":
        fail({",", ";", "end of input"})
    return t


def parse_rule(line: str) -> StructRule:
    if "=>" not in line:
        raise MalformedInput(f"rule {line!r} lacks '=>'")
    lhs, rhs = line.split("=>", 1)
    premises = tuple(parse_bterm(p) for p in lhs.split("&")) if lhs.strip() else ()
    return StructRule(premises, parse_bterm(rhs))


def parse_ruleset(text: str) -> RuleSet:
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rules.append(parse_rule(line))
        except ParseError as e:
            raise ParseError(e.reason, lineno, e.column, e.expected) from None
    return RuleSet(tuple(rules))


def load_ruleset(path) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        return parse_ruleset(fh.read())


def ruleset(rules: Iterable[StructRule]) -> RuleSet:
    return RuleSet(tuple(rules))
