"""Test corpora: kernel coverage pairs, cut-bearing derivations, random derivations, formula samples.

Corpus entries serialize to JSON files::

    {"name": ..., "kind": "kernel" | "cut", "expect": "accept" | "reject" | "cut-free",
     "config": {"rules": [...], "s4": bool, "allow_cut": bool}, "depth": 12,
     "derivation": {...}}
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from . import calculus as K
from .bterm import AFFINE, RuleSet, parse_rule
from .calculus import CalculusConfig, Derivation, Rule
from .errors import MalformedInput
from .interchange import from_document, to_document
from .parsing import parse_bunch, parse_formula, parse_sequent
from .syntax import (
    BINARY,
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
    CommaL,
    CommaR,
    Formula,
    Frame,
    Impl,
    Leaf,
    Or,
    Semi,
    SemiR,
    Sep,
    Sequent,
    Wand,
    box_bunch,
    decompositions,
    formula_positions,
    is_boxed,
)

IDENTITY = BunchCtx()
AFFINE_CFG = CalculusConfig(RuleSet((AFFINE,)))
BI_CUT = CalculusConfig(cut_allowed=True)
AFFINE_CUT = CalculusConfig(RuleSet((AFFINE,)), cut_allowed=True)
BIS4_CUT = CalculusConfig(s4=True, cut_allowed=True)


def config_to_doc(cfg: CalculusConfig) -> dict:
    return {"rules": [str(r) for r in cfg.struct_rules], "s4": cfg.s4, "allow_cut": cfg.cut_allowed}


def config_from_doc(doc: dict) -> CalculusConfig:
    rules = RuleSet(tuple(parse_rule(r) for r in doc.get("rules", [])))
    return CalculusConfig(rules, bool(doc.get("s4", False)), bool(doc.get("allow_cut", False)))


@dataclass
class Entry:
    name: str
    kind: str  # "kernel" or "cut"
    expect: str  # "accept", "reject" or "cut-free"
    config: CalculusConfig
    derivation: Derivation
    depth: int = 12
    rule: str = ""

    def to_doc(self) -> dict:
        doc = {"name": self.name, "kind": self.kind, "expect": self.expect, "config": config_to_doc(self.config)}
        if self.rule:
            doc["rule"] = self.rule
        if self.kind == "cut":
            doc["depth"] = self.depth
        doc["derivation"] = to_document(self.derivation)
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> Entry:
        try:
            return cls(
                name=doc["name"],
                kind=doc["kind"],
                expect=doc["expect"],
                config=config_from_doc(doc.get("config", {})),
                derivation=from_document(doc["derivation"]),
                depth=int(doc.get("depth", 12)),
                rule=doc.get("rule", ""),
            )
        except KeyError as e:
            raise MalformedInput(f"corpus entry lacks {e}") from None


# ---------------------------------------------------------------------------
# Kernel coverage: one accepted instance and one near miss per rule form


def _f(text: str) -> Formula:
    return parse_formula(text)


def _b(text: str) -> Bunch:
    return parse_bunch(text)


def _raw(rule: Rule, seq: str, premises=(), **kw) -> Derivation:
    """A node with a hand-written conclusion, bypassing the builders."""
    return Derivation(rule, parse_sequent(seq), tuple(premises), **kw)


def kernel_pairs() -> list[tuple[str, CalculusConfig, Derivation, CalculusConfig, Derivation]]:
    """``(rule, cfg, positive, cfg, near_miss)`` for every rule form."""
    from .search import prove_cf

    a, b, c = K.ax("a"), K.ax("b"), K.ax("c")
    ab = K.sep_r(a, b)  # a , b |- a * b
    out = []

    def add(rule, pos, neg, cfg=K.BI, neg_cfg=None):
        out.append((rule, cfg, pos, neg_cfg or cfg, neg))

    add("Ax", a, _raw(Rule.AX, "a |- b"))
    add("Equiv", K.equiv(ab, _b("b , a")), K.equiv(ab, _b("b ; a")))
    add("WeakenSemi", K.weaken_semi(a, IDENTITY, _b("b")), _raw(Rule.WEAKEN_SEMI, "a , b |- a", [a], ctx=IDENTITY))
    # the contraction instance (a , b) , c from ((a , b) ; (a , b)) , c
    abc = K.sep_r(ab, c)
    doubled = K.weaken_semi(abc, BunchCtx((CommaR(Leaf(_f("c"))),)), _b("a , b"))
    contr = K.contract_semi(doubled, BunchCtx((CommaR(Leaf(_f("c"))),)))
    bad_contr = Derivation(Rule.CONTRACT_SEMI, parse_sequent("(b , a) , c |- (a * b) * c"), (doubled,), ctx=contr.ctx)
    add("ContractSemi", contr, bad_contr)
    lem = K.disj_r1(a, _f("b"))  # a |- a \/ b
    swap = prove_cf(parse_sequent("a \\/ b |- b \\/ a"), K.BI, 6)
    cut = K.cut(lem, swap, IDENTITY)
    add("Cut", cut, cut, cfg=BI_CUT, neg_cfg=K.BI)
    add("EmpR", K.emp_r(), _raw(Rule.EMP_R, "empa |- emp"))
    empl = K.emp_l(K.emp_r(), IDENTITY)
    add("EmpL", empl, _raw(Rule.EMP_L, "emp |- emp", [K.true_r()], ctx=IDENTITY))
    add("SepR", ab, _raw(Rule.SEP_R, "a ; b |- a * b", [a, b]))
    sepl = K.sep_l(ab, IDENTITY)
    add("SepL", sepl, _raw(Rule.SEP_L, "a /\\ b |- a * b", [ab], ctx=IDENTITY))
    wandr = K.wand_r(K.equiv(ab, _b("b , a")))  # b |- a -* a * b
    add("WandR", wandr, _raw(Rule.WAND_R, "b |- a -* a * b", [ab]))
    major = K.equiv(b, Comma(EMPM, Leaf(_f("b"))))
    wandl = K.wand_l(a, major, IDENTITY)  # (a , empm) , a -* b |- b
    add("WandL", wandl, _raw(Rule.WAND_L, "(a , empm) , a -* b |- a", [a, major], ctx=IDENTITY))
    add("TrueR", K.true_r(), _raw(Rule.TRUE_R, "empm |- top"))
    truel = K.true_l(K.true_r(), IDENTITY)
    add("TrueL", truel, _raw(Rule.TRUE_L, "top |- top", [K.emp_r()], ctx=IDENTITY))
    andr = K.and_r(a, b)
    add("AndR", andr, _raw(Rule.AND_R, "a , b |- a /\\ b", [a, b]))
    # p , (p /\ q) |- p * q with the context p , [-]
    premise = prove_cf(parse_sequent("p , (p ; q) |- p * q"), K.BI, 8)
    andl = K.and_l(premise, BunchCtx((CommaL(Leaf(_f("p"))),)))
    bad_andl = Derivation(Rule.AND_L, parse_sequent("p , (p /\\ q) |- p * q"), (premise,), ctx=BunchCtx((CommaR(Leaf(_f("p /\\ q"))),)))
    add("AndL", andl, bad_andl)
    implr = K.impl_r(K.weaken_semi(a, IDENTITY, _b("b")))  # a |- b -> a
    add("ImplR", implr, _raw(Rule.IMPL_R, "a |- b -> a", [a]))
    majori = K.equiv(b, Semi(EMPA, Leaf(_f("b"))))
    impll = K.impl_l(a, majori, IDENTITY)
    add("ImplL", impll, _raw(Rule.IMPL_L, "(a ; empa) ; a -* b |- b", [a, majori], ctx=IDENTITY))
    falsel = K.false_l(BunchCtx((CommaR(Leaf(_f("a"))),)), _f("c"))
    add("FalseL", falsel, _raw(Rule.FALSE_L, "top , a |- c", ctx=BunchCtx((CommaR(Leaf(_f("a"))),))))
    add("DisjR1", K.disj_r1(a, _f("b")), _raw(Rule.DISJ_R1, "a |- b \\/ a", [a]))
    add("DisjR2", K.disj_r2(a, _f("b")), _raw(Rule.DISJ_R2, "a |- a \\/ b", [a]))
    disjl = K.disj_l(K.disj_r2(a, _f("b")), K.disj_r1(b, _f("a")), IDENTITY)
    add("DisjL", disjl, _raw(Rule.DISJ_L, "a \\/ b |- b \\/ a", [K.disj_r2(a, _f("b")), K.disj_r2(a, _f("b"))], ctx=IDENTITY))
    boxl = K.box_l(a, IDENTITY)  # box a |- a
    boxr = K.box_r(boxl)  # box a |- box a
    add("BoxR", boxr, _raw(Rule.BOX_R, "a |- box a", [a]), cfg=K.BIS4)
    add("BoxL", boxl, boxl, cfg=K.BIS4, neg_cfg=K.BI)
    se = K.struct_ext([a], _f("a"), IDENTITY, 0, AFFINE, {1: Leaf(_f("a")), 2: Leaf(_f("b"))})
    bad_se = Derivation(Rule.STRUCT_EXT, se.conclusion, (b,), ctx=IDENTITY, index=0, env=se.env)
    add("StructExt", se, bad_se, cfg=AFFINE_CFG)
    return out


def kernel_entries() -> list[Entry]:
    entries = []
    for rule, cfg, pos, neg_cfg, neg in kernel_pairs():
        entries.append(Entry(f"kernel-{rule}-accept", "kernel", "accept", cfg, pos, rule=rule))
        entries.append(Entry(f"kernel-{rule}-reject", "kernel", "reject", neg_cfg, neg, rule=rule))
    return entries


# ---------------------------------------------------------------------------
# Cut corpus

#: (left lemma, right premise); the cut acts on the first occurrence of the lemma formula
CUT_SPECS: dict[str, list[tuple[str, str]]] = {
    "bi": [
        ("a |- a \\/ b", "a \\/ b |- b \\/ a"),
        ("p /\\ q |- q", "p , q |- p * q"),
        ("a , b |- a * b", "(a * b) , c |- (a * b) * c"),
        ("a , b |- (a * b) /\\ (a * b)", "((a * b) /\\ (a * b)) , c |- (a * b) * c"),
        ("(a , b) ; (a , b) |- a * b", "a * b , c |- c * (b * a)"),
        ("a * b |- b * a", "b * a |- a * b"),
        ("a |- a /\\ a", "a /\\ a |- a"),
        ("a , (a -* b) |- b", "b |- b \\/ c"),
        ("a ; (a -> b) |- b", "b , c |- b * c"),
        ("emp |- a -* a", "a -* a |- a -* a"),
        ("a /\\ b |- b /\\ a", "b /\\ a , c |- (b /\\ a) * c"),
        ("a * (b \\/ c) |- a * b \\/ a * c", "a * b \\/ a * c |- a * (b \\/ c)"),
        ("top |- top", "top |- top"),
        ("empm |- emp", "emp , a |- a"),
        ("a |- top", "top ; b |- b"),
        ("bot |- a", "a , b |- a * b"),
        ("a , b |- b * a", "b * a |- b * a"),
        ("a -> b ; a |- b", "b |- a -> b"),
        ("a |- (a -> b) -> b", "(a -> b) -> b ; (a -> b) |- b"),
        ("a * b |- a * b", "a * b , c -* d |- (a * b) * (c -* d)"),
        ("a , b |- a * b", "(a * b) -* c , (a * b) |- c"),
        ("a \\/ b |- b \\/ a", "b \\/ a , c |- (b \\/ a) * c"),
        ("(a -* b) , a |- b", "b ; c |- b /\\ c"),
        ("a |- b -* a * b", "b -* a * b , b |- a * b"),
        ("a /\\ (b \\/ c) |- a /\\ b \\/ a /\\ c", "a /\\ b \\/ a /\\ c |- (a /\\ b) \\/ c"),
        ("emp * a |- a", "a , b |- a * b"),
        ("a |- emp * a", "emp * a , b |- (emp * a) * b"),
        ("(a ; b) , c |- (a /\\ b) * c", "(a /\\ b) * c |- c * (a /\\ b)"),
    ],
    "affine": [
        ("a * b |- a", "a |- a \\/ c"),
        ("a , b |- b", "b |- b \\/ a"),
        ("b * c |- c", "a , c |- a * c"),
        ("a , b |- a", "a , c |- a * c"),
        ("a * (b * c) |- a * c", "a * c |- c * a"),
        ("a |- emp -* a", "emp -* a , b |- (emp -* a) * b"),
        ("(a , b) , c |- a * c", "a * c , d |- a * c"),
    ],
    "s4": [
        ("box a |- a", "a |- a \\/ b"),
        ("box a |- box box a", "box box a |- box a"),
        ("box a , box b |- box (a * b)", "box (a * b) |- a * b"),
        ("box (a /\\ b) |- box a", "box a |- a"),
        ("box a |- a", "a , c |- a * c"),
        ("box a ; box b |- box (a /\\ b)", "box (a /\\ b) |- b /\\ a"),
        ("box a |- a \\/ b", "a \\/ b |- b \\/ a"),
        ("box (a * b) |- box (b * a)", "box (b * a) |- b * a"),
    ],
}

_FAMILY_CFG = {"bi": (K.BI, BI_CUT), "affine": (AFFINE_CFG, AFFINE_CUT), "s4": (K.BIS4, BIS4_CUT)}


def _first_position(b: Bunch, f: Formula) -> BunchCtx:
    for ctx, g in formula_positions(b):
        if g == f:
            return ctx
    raise MalformedInput(f"{f} does not occur in {b}")


def build_cut(left_text: str, right_text: str, cf_cfg: CalculusConfig, depth: int = 12) -> Derivation:
    from .search import prove_cf

    left_s, right_s = parse_sequent(left_text), parse_sequent(right_text)
    left = prove_cf(left_s, cf_cfg, depth)
    right = prove_cf(right_s, cf_cfg, depth)
    if left is None or right is None:
        missing = left_text if left is None else right_text
        raise MalformedInput(f"no cut-free proof of lemma {missing!r} found")
    return K.cut(left, right, _first_position(right.lhs, left.rhs))


def cut_entries() -> list[Entry]:
    out = []
    for family, specs in CUT_SPECS.items():
        cf_cfg, cut_cfg = _FAMILY_CFG[family]
        for i, (left, right) in enumerate(specs):
            d = build_cut(left, right, cf_cfg)
            out.append(Entry(f"cut-{family}-{i:02d}", "cut", "cut-free", cut_cfg, d, depth=12))
    return out


def write_corpus(root: Path) -> list[Path]:
    """Write kernel and cut corpora as one JSON file per entry."""
    written = []
    for sub, entries in (("kernel", kernel_entries()), ("cut", cut_entries())):
        d = Path(root) / sub
        d.mkdir(parents=True, exist_ok=True)
        for e in entries:
            path = d / f"{e.name}.json"
            path.write_text(json.dumps(e.to_doc(), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
            written.append(path)
    return written


def load_corpus(root: Path) -> list[Entry]:
    files = sorted(Path(root).rglob("*.json"))
    return [Entry.from_doc(json.loads(p.read_text(encoding="utf-8"))) for p in files]


# ---------------------------------------------------------------------------
# Random formulas and bunches

ATOMS = ("a", "b", "c")


def formulas_up_to_depth(depth: int, atoms=ATOMS, s4: bool = False) -> list[Formula]:
    """Every formula of depth at most ``depth`` (only feasible for depth ≤ 2)."""
    level = [Atom(x) for x in atoms] + [TOP, BOT, EMP]
    every = list(level)
    for _ in range(depth):
        new = [op(x, y) for op in BINARY for x in every for y in every]
        if s4:
            new += [Box(x) for x in every]
        seen = set(every)
        every = every + [f for f in dict.fromkeys(new) if f not in seen]
    return every


def random_formula(rng: random.Random, depth: int, atoms=ATOMS, s4: bool = False) -> Formula:
    if depth == 0 or rng.random() < 0.2:
        pool = [Atom(x) for x in atoms] + [TOP, BOT, EMP]
        return rng.choice(pool)
    if s4 and rng.random() < 0.15:
        return Box(random_formula(rng, depth - 1, atoms, s4))
    op = rng.choice(BINARY)
    return op(random_formula(rng, depth - 1, atoms, s4), random_formula(rng, depth - 1, atoms, s4))


def identity_formulas(count: int = 2400, seed: int = 7, s4: bool = False) -> list[Formula]:
    """All formulas of depth ≤ 1 and a seeded sample of depth 2 to 4, ``count`` in total."""
    base = formulas_up_to_depth(1, s4=s4)
    rng = random.Random(seed)
    seen = set(base)
    out = list(base)
    while len(out) < count:
        f = random_formula(rng, rng.choice([2, 3, 4]), s4=s4)
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


def all_bunches(max_size: int, atoms=("a", "b")) -> list[Bunch]:
    """Every bunch over ``atoms`` (and both units) with at most ``max_size`` nodes."""
    by_size: dict[int, list[Bunch]] = {1: [Leaf(Atom(x)) for x in atoms] + [EMPM, EMPA]}
    for n in range(2, max_size + 1):
        level = []
        for k in range(1, n - 1):
            for left in by_size.get(k, []):
                for right in by_size.get(n - 1 - k, []):
                    level.append(Comma(left, right))
                    level.append(Semi(left, right))
        by_size[n] = level
    return [b for n in sorted(by_size) for b in by_size[n]]


# ---------------------------------------------------------------------------
# Random forward-generated derivations


class DerivationGenerator:
    """Random cut-free derivations grown from leaves with forward rule applications."""

    def __init__(self, cfg: CalculusConfig, seed: int = 0, max_height: int = 6, side_formulas: list[Formula] | None = None):
        self.cfg = cfg
        self.rng = random.Random(seed)
        self.max_height = max_height
        self.side = side_formulas or []

    def side_formula(self) -> Formula:
        rng = self.rng
        if self.side and rng.random() < 0.6:
            return rng.choice(self.side)
        return random_formula(rng, 2, s4=self.cfg.s4)

    def side_bunch(self) -> Bunch:
        rng = self.rng
        r = rng.random()
        if r < 0.1:
            return rng.choice([EMPM, EMPA])
        if r < 0.75:
            return Leaf(self.side_formula())
        op = rng.choice([Comma, Semi])
        return op(Leaf(self.side_formula()), Leaf(self.side_formula()))

    def leaf(self) -> Derivation:
        rng = self.rng
        r = rng.random()
        if r < 0.6:
            return K.ax(rng.choice(ATOMS))
        if r < 0.7:
            return K.emp_r()
        if r < 0.8:
            return K.true_r()
        ctx = self.random_ctx_around()
        return K.false_l(ctx, random_formula(rng, 1))

    def random_ctx_around(self) -> BunchCtx:
        frames = []
        for _ in range(self.rng.choice([0, 1, 1, 2])):
            op = self.rng.choice([",", ";"])
            frames.append(Frame(op, self.rng.random() < 0.5, self.side_bunch()))
        return BunchCtx(tuple(frames))

    def generate(self, height: int | None = None) -> Derivation:
        h = self.max_height if height is None else height
        if h == 0 or self.rng.random() < 0.12:
            return self.leaf()
        for _ in range(8):
            step = self.rng.choice(self.STEPS)
            d = step(self, h)
            if d is not None and d.height <= h:
                return d
        return self.leaf()

    # unary steps -----------------------------------------------------------

    def _pick_position(self, d: Derivation):
        return self.rng.choice(decompositions(d.lhs))

    def step_weaken(self, h):
        d = self.generate(h - 1)
        dec = self._pick_position(d)
        return K.weaken_semi(d, dec.ctx, self.side_bunch())

    def step_contract(self, h):
        # duplicate a sub-bunch by weakening, then contract it, or contract an
        # additive pair of derivations of the same bunch
        if h >= 2 and self.rng.random() < 0.5:
            d = self.generate(h - 2)
            dec = self._pick_position(d)
            return K.contract_semi(K.weaken_semi(d, dec.ctx, dec.leaf), dec.ctx)
        if h >= 2:
            d1 = self.generate(h - 2)
            d2 = self.regenerate_same_lhs(d1, h - 2)
            if d2 is not None:
                return K.contract_semi(K.and_r(d1, d2), IDENTITY)
        return None

    def regenerate_same_lhs(self, d: Derivation, h: int) -> Derivation | None:
        """Another derivation with the same bunch (a right rule on top of ``d``)."""
        choice = self.rng.random()
        if choice < 0.5:
            return K.disj_r1(d, self.side_formula())
        return K.disj_r2(d, self.side_formula())

    def _pair_positions(self, d: Derivation, node_type):
        return [dec for dec in decompositions(d.lhs) if isinstance(dec.leaf, node_type)
                and isinstance(dec.leaf.left, Leaf) and isinstance(dec.leaf.right, Leaf)]

    def step_sep_l(self, h):
        d = self.generate(h - 1)
        hits = self._pair_positions(d, Comma)
        return K.sep_l(d, self.rng.choice(hits).ctx) if hits else None

    def step_and_l(self, h):
        d = self.generate(h - 1)
        hits = self._pair_positions(d, Semi)
        return K.and_l(d, self.rng.choice(hits).ctx) if hits else None

    def step_unit_l(self, h):
        d = self.generate(h - 1)
        hits = [dec for dec in decompositions(d.lhs) if dec.leaf in (EMPM, EMPA)]
        if not hits:
            return None
        dec = self.rng.choice(hits)
        return K.emp_l(d, dec.ctx) if dec.leaf == EMPM else K.true_l(d, dec.ctx)

    def step_right_intro(self, h):
        d = self.generate(h - 1)
        if isinstance(d.lhs, Comma) and isinstance(d.lhs.right, Leaf):
            return K.wand_r(d)
        if isinstance(d.lhs, Semi) and isinstance(d.lhs.right, Leaf):
            return K.impl_r(d)
        return None

    def step_disj_r(self, h):
        d = self.generate(h - 1)
        if self.rng.random() < 0.5:
            return K.disj_r1(d, self.side_formula())
        return K.disj_r2(d, self.side_formula())

    def step_equiv(self, h):
        d = self.generate(h - 1)
        from .syntax import normalize

        b = d.lhs
        r = self.rng.random()
        if r < 0.3:
            target = normalize(b)
        elif r < 0.6 and isinstance(b, (Comma, Semi)):
            target = type(b)(b.right, b.left)
        else:
            target = Comma(b, EMPM) if self.rng.random() < 0.5 else Semi(EMPA, b)
        return K.equiv(d, target)

    def step_box_l(self, h):
        if not self.cfg.s4:
            return None
        d = self.generate(h - 1)
        pos = formula_positions(d.lhs)
        if not pos:
            return None
        ctx, _ = self.rng.choice(pos)
        return K.box_l(d, ctx)

    def step_box_r(self, h):
        if not self.cfg.s4:
            return None
        d = self.generate(h - 1)
        return K.box_r(d) if is_boxed(d.lhs) else None

    def step_struct(self, h):
        if not len(self.cfg.struct_rules):
            return None
        d = self.generate(h - 1)
        i = self.rng.randrange(len(self.cfg.struct_rules))
        rule = self.cfg.struct_rules[i]
        if rule != AFFINE:
            return None
        dec = self._pick_position(d)
        env = {1: dec.leaf, 2: self.side_bunch()}
        return K.struct_ext([d], d.rhs, dec.ctx, i, rule, env)

    # binary steps ------------------------------------------------------------

    def step_sep_r(self, h):
        return K.sep_r(self.generate(h - 1), self.generate(h - 1))

    def step_and_r(self, h):
        return K.and_r(self.generate(h - 1), self.generate(h - 1))

    def step_arrow_l(self, h):
        if h < 2:
            return None
        minor = self.generate(h - 1)
        major = self.generate(h - 2)
        pos = formula_positions(major.lhs)
        if not pos:
            return None
        ctx, psi = self.rng.choice(pos)
        if self.rng.random() < 0.5:
            major = K.equiv(major, ctx.fill(Comma(EMPM, Leaf(psi))))
            return K.wand_l(minor, major, ctx)
        major = K.equiv(major, ctx.fill(Semi(EMPA, Leaf(psi))))
        return K.impl_l(minor, major, ctx)

    def step_disj_l(self, h):
        # the other branch is either the same derivation (f \/ f) or FalseL (f \/ bot)
        d = self.generate(h - 1)
        pos = formula_positions(d.lhs)
        if not pos:
            return None
        ctx, _ = self.rng.choice(pos)
        other = d if self.rng.random() < 0.5 else K.false_l(ctx, d.rhs)
        if self.rng.random() < 0.5:
            return K.disj_l(d, other, ctx)
        return K.disj_l(other, d, ctx)

    STEPS = [
        step_weaken,
        step_weaken,
        step_contract,
        step_contract,
        step_sep_l,
        step_sep_l,
        step_and_l,
        step_and_l,
        step_unit_l,
        step_right_intro,
        step_disj_r,
        step_equiv,
        step_box_l,
        step_box_l,
        step_box_r,
        step_struct,
        step_sep_r,
        step_and_r,
        step_arrow_l,
        step_disj_l,
    ]


def inversion_inputs(
    shape: str, count: int = 500, cfg: CalculusConfig = K.BI, seed: int = 1, max_height: int = 6
) -> Iterator[tuple[Derivation, BunchCtx]]:
    """Random derivations (height ≤ ``max_height``) paired with a position of a principal formula.

    ``shape`` is one of ``sep``, ``and``, ``top``, ``emp`` or ``boxbox``.
    """
    match = {
        "sep": lambda f: isinstance(f, Sep),
        "and": lambda f: isinstance(f, And),
        "top": lambda f: f == TOP,
        "emp": lambda f: f == EMP,
        "boxbox": lambda f: isinstance(f, Box) and isinstance(f.body, Box),
    }[shape]
    side = {
        "sep": [_f("a * b"), _f("(a * b) * c"), _f("b * top")],
        "and": [_f("a /\\ b"), _f("c /\\ (a * b)"), _f("emp /\\ a")],
        "top": [TOP, _f("top * a")],
        "emp": [EMP, _f("emp /\\ a")],
        "boxbox": [_f("box box a"), _f("box box (a * b)"), _f("box box box b")],
    }[shape]
    gen = DerivationGenerator(cfg, seed=seed, max_height=max_height, side_formulas=side)
    rng = random.Random(seed + 1000)
    produced = 0
    attempts = 0
    while produced < count:
        attempts += 1
        if attempts > 200 * count:
            raise RuntimeError(f"generator stalled after {produced} {shape} inputs")
        d = gen.generate()
        hits = [ctx for ctx, f in formula_positions(d.lhs) if match(f)]
        if not hits:
            continue
        produced += 1
        yield d, rng.choice(hits)


# ---------------------------------------------------------------------------
# Search regression corpus: (sequent, family, provable within depth 12)

SEARCH_REGRESSION: list[tuple[str, str, bool]] = [
    ("a |- a", "bi", True),
    ("p , (p /\\ q) |- p * q", "bi", True),
    ("a * b |- b * a", "bi", True),
    ("a |- b \\/ a", "bi", True),
    ("(a , b) , c |- (a * b) * c", "bi", True),
    ("a |- a /\\ a", "bi", True),
    ("a , (a -* b) |- b", "bi", True),
    ("a ; (a -> b) |- b", "bi", True),
    ("(a -> b) ; (b -> c) |- a -> c", "bi", True),
    ("a * (b \\/ c) |- a * b \\/ a * c", "bi", True),
    ("(a -* b) * (b -* c) |- a -* c", "bi", True),
    ("emp |- a -* a", "bi", True),
    ("a /\\ b |- b /\\ a", "bi", True),
    ("a -> b -> c |- (a /\\ b) -> c", "bi", True),
    ("bot |- a * b", "bi", True),
    ("a * emp |- a", "bi", True),
    ("a |- top", "bi", True),
    ("a , b |- a", "bi", False),
    ("a * b |- a", "bi", False),
    ("top |- emp", "bi", False),
    ("emp |- top -> emp", "bi", True),
    ("a |- a * a", "bi", False),
    ("a /\\ b |- a * b", "bi", False),
    ("((a -> b) -> a) -> a |- a", "bi", False),
    ("a -* b |- a -> b", "bi", False),
    ("a * b |- a", "affine", True),
    ("a , b |- b", "affine", True),
    ("a * (b * c) |- a * c", "affine", True),
    ("a -> b |- a -* b", "affine", True),
    ("a |- a * a", "affine", False),
    ("box a |- a", "s4", True),
    ("box a |- box box a", "s4", True),
    ("box a , box b |- box (a * b)", "s4", True),
    ("box a ; box b |- box (a /\\ b)", "s4", True),
    ("a |- box a", "s4", False),
    ("box (a \\/ b) |- box a \\/ box b", "s4", False),
]

FAMILY_CONFIGS = {"bi": K.BI, "affine": AFFINE_CFG, "s4": K.BIS4}
