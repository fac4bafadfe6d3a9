"""Formulas, bunches, bunched contexts and bunch decomposition.

Bunches are trees whose leaves are formulas or one of the two units and
whose inner nodes are ``,`` (multiplicative) or ``;`` (additive).  Bunches
are compared up to the congruence generated by the commutative monoid laws
of ``(",", empm)`` and ``(";", empa)``; :func:`normalize` picks a canonical
representative of each class.

A bunched context (a bunch with one hole) is a zipper: a list of frames,
outermost first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

from .errors import MalformedInput

# ---------------------------------------------------------------------------
# Formulas


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return show_formula(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Emp(Formula):
    pass


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Impl(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Sep(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Wand(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    body: Formula


TOP = Top()
BOT = Bot()
EMP = Emp()

BINARY = (And, Or, Impl, Sep, Wand)

# (symbol, precedence); larger binds tighter.  All binaries are right-associative.
_BIN_SYNTAX = {Sep: ("*", 5), And: ("/\\", 4), Or: ("\\/", 3), Wand: ("-*", 2), Impl: ("->", 1)}
_BOX_PREC = 6


def _fprec(f: Formula) -> int:
    entry = _BIN_SYNTAX.get(type(f))
    return entry[1] if entry else 7


def show_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Emp):
        return "emp"
    if isinstance(f, Box):
        inner = show_formula(f.body)
        if _fprec(f.body) < _BOX_PREC:
            inner = f"({inner})"
        return f"box {inner}"
    sym, prec = _BIN_SYNTAX[type(f)]
    left = show_formula(f.left)
    if _fprec(f.left) <= prec:
        left = f"({left})"
    right = show_formula(f.right)
    if _fprec(f.right) < prec:
        right = f"({right})"
    return f"{left} {sym} {right}"


def formula_size(f: Formula) -> int:
    if isinstance(f, BINARY):
        return 1 + formula_size(f.left) + formula_size(f.right)
    if isinstance(f, Box):
        return 1 + formula_size(f.body)
    return 1


def formula_depth(f: Formula) -> int:
    if isinstance(f, BINARY):
        return 1 + max(formula_depth(f.left), formula_depth(f.right))
    if isinstance(f, Box):
        return 1 + formula_depth(f.body)
    return 0


def formula_atoms(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, BINARY):
        return formula_atoms(f.left) | formula_atoms(f.right)
    if isinstance(f, Box):
        return formula_atoms(f.body)
    return set()


def has_box(f: Formula) -> bool:
    if isinstance(f, Box):
        return True
    if isinstance(f, BINARY):
        return has_box(f.left) or has_box(f.right)
    return False


# ---------------------------------------------------------------------------
# Bunches


class Bunch:
    __slots__ = ()

    def __str__(self) -> str:
        return show_bunch(self)


@dataclass(frozen=True, slots=True)
class Leaf(Bunch):
    formula: Formula


@dataclass(frozen=True, slots=True)
class EmpM(Bunch):
    pass


@dataclass(frozen=True, slots=True)
class EmpA(Bunch):
    pass


@dataclass(frozen=True, slots=True)
class Comma(Bunch):
    left: Bunch
    right: Bunch


@dataclass(frozen=True, slots=True)
class Semi(Bunch):
    left: Bunch
    right: Bunch


EMPM = EmpM()
EMPA = EmpA()

Node = Union[Comma, Semi]


def show_bunch(b: Bunch) -> str:
    """Print with the fewest parentheses that re-parse to the same tree.

    ``,`` binds tighter than ``;`` and both are read left-nested.
    """
    if isinstance(b, Leaf):
        return show_formula(b.formula)
    if isinstance(b, EmpM):
        return "empm"
    if isinstance(b, EmpA):
        return "empa"
    if isinstance(b, Semi):
        left = show_bunch(b.left)
        right = show_bunch(b.right)
        if isinstance(b.right, Semi):
            right = f"({right})"
        return f"{left} ; {right}"
    left = show_bunch(b.left)
    if isinstance(b.left, Semi):
        left = f"({left})"
    right = show_bunch(b.right)
    if isinstance(b.right, (Comma, Semi)):
        right = f"({right})"
    return f"{left} , {right}"


def bunch_size(b: Bunch) -> int:
    if isinstance(b, (Comma, Semi)):
        return 1 + bunch_size(b.left) + bunch_size(b.right)
    return 1


def bunch_leaves(b: Bunch) -> Iterator[Bunch]:
    if isinstance(b, (Comma, Semi)):
        yield from bunch_leaves(b.left)
        yield from bunch_leaves(b.right)
    else:
        yield b


def bunch_formulas(b: Bunch) -> Iterator[Formula]:
    for leaf in bunch_leaves(b):
        if isinstance(leaf, Leaf):
            yield leaf.formula


@dataclass(frozen=True, slots=True)
class Sequent:
    lhs: Bunch
    rhs: Formula

    def __str__(self) -> str:
        return f"{show_bunch(self.lhs)} |- {show_formula(self.rhs)}"


# ---------------------------------------------------------------------------
# Canonical forms


def _region(b: Bunch, op: type) -> list[Bunch]:
    # b is already normalized; a normalized op-node is a left-nested chain
    unit = EmpM if op is Comma else EmpA
    if isinstance(b, unit):
        return []
    items = []
    while isinstance(b, op):
        items.append(b.right)
        b = b.left
    items.append(b)
    items.reverse()
    return items


def _rebuild(items: list[Bunch], op: type) -> Bunch:
    if not items:
        return EMPM if op is Comma else EMPA
    out = items[0]
    for item in items[1:]:
        out = op(out, item)
    return out


@lru_cache(maxsize=200_000)
def normalize(b: Bunch) -> Bunch:
    """Canonical representative of the ≡-class of ``b``.

    Each maximal region of one connective is flattened, its unit removed, and
    the remaining children sorted by their printed normal form; an empty
    region becomes the unit and a singleton region its only child.
    """
    if isinstance(b, (Comma, Semi)):
        op = type(b)
        items = _region(normalize(b.left), op) + _region(normalize(b.right), op)
        items.sort(key=show_bunch)
        return _rebuild(items, op)
    return b


def bunch_equiv(b1: Bunch, b2: Bunch) -> bool:
    return b1 == b2 or normalize(b1) == normalize(b2)


def region_items(b: Bunch, op: type) -> list[Bunch]:
    """Children of the ``op``-region rooted at the normal form of ``b``."""
    return _region(normalize(b), op)


def from_region(items: list[Bunch], op: type) -> Bunch:
    """Left-nested ``op``-chain of ``items`` (unit when empty), not re-sorted."""
    return _rebuild(list(items), op)


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True, slots=True)
class Frame:
    """One step of a bunched context: ``other op [-]`` or ``[-] op other``."""

    op: str  # "," or ";"
    hole_left: bool
    other: Bunch

    def plug(self, b: Bunch) -> Bunch:
        node = Comma if self.op == "," else Semi
        return node(b, self.other) if self.hole_left else node(self.other, b)

    @property
    def token(self) -> str:
        return ("L" if self.hole_left else "R") + self.op


def CommaL(other: Bunch) -> Frame:
    """Frame ``other , [-]`` (the fixed part on the left)."""
    return Frame(",", False, other)


def CommaR(other: Bunch) -> Frame:
    """Frame ``[-] , other``."""
    return Frame(",", True, other)


def SemiL(other: Bunch) -> Frame:
    return Frame(";", False, other)


def SemiR(other: Bunch) -> Frame:
    return Frame(";", True, other)


@dataclass(frozen=True, slots=True)
class BunchCtx:
    frames: tuple[Frame, ...] = ()

    def fill(self, b: Bunch) -> Bunch:
        for frame in reversed(self.frames):
            b = frame.plug(b)
        return b

    def __add__(self, other: BunchCtx) -> BunchCtx:
        return BunchCtx(self.frames + other.frames)

    def then(self, *frames: Frame) -> BunchCtx:
        return BunchCtx(self.frames + frames)

    @property
    def is_identity(self) -> bool:
        return not self.frames

    def path(self) -> str:
        return "".join(f.token for f in self.frames)

    def __str__(self) -> str:
        return show_bunch(self.fill(Leaf(Atom("[-]"))))


IDENTITY = BunchCtx()


def fill(ctx: BunchCtx, b: Bunch) -> Bunch:
    return ctx.fill(b)


def focus(b: Bunch, ctx: BunchCtx) -> Bunch | None:
    """The sub-bunch ``s`` with ``fill(ctx, s) == b``, or None if ``ctx`` does not fit ``b``."""
    for frame in ctx.frames:
        node = Comma if frame.op == "," else Semi
        if not isinstance(b, node):
            return None
        if frame.hole_left:
            if b.right != frame.other:
                return None
            b = b.left
        else:
            if b.left != frame.other:
                return None
            b = b.right
    return b


def parse_path(path: str) -> list[tuple[bool, str]]:
    """Split a compact frame path such as ``"R,L;"`` into (hole_left, op) steps."""
    steps = []
    s = path.replace(" ", "")
    if len(s) % 2:
        raise MalformedInput(f"bad frame path {path!r}")
    for i in range(0, len(s), 2):
        side, op = s[i], s[i + 1]
        if side not in "LR" or op not in ",;":
            raise MalformedInput(f"bad frame path {path!r} at offset {i}")
        steps.append((side == "L", op))
    return steps


def ctx_at_path(b: Bunch, path: str) -> tuple[BunchCtx, Bunch]:
    """Context and sub-bunch addressed by walking ``path`` down from the root of ``b``."""
    frames = []
    for hole_left, op in parse_path(path):
        node = Comma if op == "," else Semi
        if not isinstance(b, node):
            raise MalformedInput(f"frame path {path!r} does not fit the bunch")
        if hole_left:
            frames.append(Frame(op, True, b.right))
            b = b.left
        else:
            frames.append(Frame(op, False, b.left))
            b = b.right
    return BunchCtx(tuple(frames)), b


# ---------------------------------------------------------------------------
# Decomposition


@dataclass(frozen=True, slots=True)
class Decomposition:
    ctx: BunchCtx
    leaf: Bunch


def decompositions(b: Bunch) -> list[Decomposition]:
    """Every way of writing ``b`` as ``ctx(sub)``, one per node of the tree."""
    out = [Decomposition(IDENTITY, b)]
    if isinstance(b, (Comma, Semi)):
        op = "," if isinstance(b, Comma) else ";"
        for d in decompositions(b.left):
            out.append(Decomposition(BunchCtx((Frame(op, True, b.right),) + d.ctx.frames), d.leaf))
        for d in decompositions(b.right):
            out.append(Decomposition(BunchCtx((Frame(op, False, b.left),) + d.ctx.frames), d.leaf))
    return out


def formula_positions(b: Bunch) -> list[tuple[BunchCtx, Formula]]:
    """Contexts of all formula leaves of ``b``, left to right."""
    return [(d.ctx, d.leaf.formula) for d in decompositions(b) if isinstance(d.leaf, Leaf)]


@dataclass(frozen=True, slots=True)
class InsideFilled:
    """The target sits inside the filled bunch at ``ctx0``."""

    ctx0: BunchCtx


@dataclass(frozen=True, slots=True)
class InsideOuter:
    """The target sits in the outer context: a context with two holes.

    Both holes hang off a common node reached by ``common``; ``target_left``
    says which child leads to the target.  ``outer_rest`` continues towards
    the filled bunch and ``whole_rest`` towards the target.
    """

    common: BunchCtx
    op: str
    target_left: bool
    outer_rest: BunchCtx
    whole_rest: BunchCtx

    def pi0(self, lam: Bunch) -> BunchCtx:
        """Context locating the target inside ``fill(outer, lam)``."""
        return self.common.then(Frame(self.op, self.target_left, self.outer_rest.fill(lam))) + self.whole_rest

    def pi1(self, lam: Bunch) -> BunchCtx:
        """Context locating the filled position inside ``fill(whole_ctx, lam)``."""
        return self.common.then(Frame(self.op, not self.target_left, self.whole_rest.fill(lam))) + self.outer_rest


def locate_in_filled(outer: BunchCtx, filled: Bunch, target: Formula, whole_ctx: BunchCtx) -> InsideFilled | InsideOuter:
    """Classify where ``target`` sits, given ``whole_ctx(target) == outer(filled)``."""
    if whole_ctx.fill(Leaf(target)) != outer.fill(filled):
        raise MalformedInput("locate_in_filled: the two decompositions describe different bunches")
    of, wf = outer.frames, whole_ctx.frames
    i = 0
    while i < len(of) and i < len(wf) and of[i].hole_left == wf[i].hole_left:
        i += 1
    if i == len(of):
        return InsideFilled(BunchCtx(wf[i:]))
    if i == len(wf):
        # the target leaf would lie strictly above the filled position
        raise MalformedInput("locate_in_filled: target position is not a leaf")
    return InsideOuter(
        common=BunchCtx(wf[:i]),
        op=wf[i].op,
        target_left=wf[i].hole_left,
        outer_rest=BunchCtx(of[i + 1 :]),
        whole_rest=BunchCtx(wf[i + 1 :]),
    )


# ---------------------------------------------------------------------------
# Collapse and boxing


def bunch_to_formula(b: Bunch) -> Formula:
    if isinstance(b, Leaf):
        return b.formula
    if isinstance(b, EmpM):
        return EMP
    if isinstance(b, EmpA):
        return TOP
    if isinstance(b, Comma):
        return Sep(bunch_to_formula(b.left), bunch_to_formula(b.right))
    return And(bunch_to_formula(b.left), bunch_to_formula(b.right))


def box_bunch(b: Bunch) -> Bunch:
    if isinstance(b, Leaf):
        return Leaf(Box(b.formula))
    if isinstance(b, (Comma, Semi)):
        return type(b)(box_bunch(b.left), box_bunch(b.right))
    return b


def unbox_bunch(b: Bunch) -> Bunch | None:
    """Inverse of :func:`box_bunch`; None when some leaf is not boxed."""
    if isinstance(b, Leaf):
        return Leaf(b.formula.body) if isinstance(b.formula, Box) else None
    if isinstance(b, (Comma, Semi)):
        left = unbox_bunch(b.left)
        if left is None:
            return None
        right = unbox_bunch(b.right)
        if right is None:
            return None
        return type(b)(left, right)
    return b


def is_boxed(b: Bunch) -> bool:
    return all(isinstance(f, Box) for f in bunch_formulas(b))


def unbox_decompose(boxed: Bunch, ctx: BunchCtx, target: Formula) -> BunchCtx:
    """Given ``boxed == box_bunch(Δ) == ctx(box target)``, the context ``Π′`` with ``Δ == Π′(target)``.

    For every Γ, ``box_bunch(Π′(Γ)) == ctx(box_bunch(Γ))``.
    """
    if unbox_bunch(boxed) is None:
        raise MalformedInput("unbox_decompose: bunch is not in the image of box_bunch")
    if ctx.fill(Leaf(Box(target))) != boxed:
        raise MalformedInput("unbox_decompose: context does not address a boxed leaf")
    return BunchCtx(tuple(Frame(f.op, f.hole_left, unbox_bunch(f.other)) for f in ctx.frames))
