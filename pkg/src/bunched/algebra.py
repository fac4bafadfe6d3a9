"""Finite BI and BIS4 algebras, interpretation and exhaustive axiom checks.

Every concrete algebra here is a :class:`FiniteBiAlgebra`: a tuple of
hashable elements with all operations tabulated.  Powerset algebras over a
partial commutative monoid use bitmasks for subsets.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .bterm import RuleSet, find_rule_violation
from .errors import MalformedInput
from .syntax import (
    And,
    Atom,
    Bot,
    Box,
    Emp,
    Formula,
    Impl,
    Or,
    Sep,
    Sequent,
    Top,
    Wand,
    bunch_to_formula,
    formula_atoms,
)

Elem = Hashable


# ---------------------------------------------------------------------------
# Algebras


class FiniteBiAlgebra:
    """A finite BI algebra, optionally with a box, given by tables."""

    def __init__(
        self,
        carrier: Sequence[Elem],
        leq: Callable[[Elem, Elem], bool],
        bot: Elem,
        top: Elem,
        meet: Callable,
        join: Callable,
        impl: Callable,
        emp: Elem,
        sep: Callable,
        wand: Callable,
        box: Callable | None = None,
        name: str = "algebra",
        show: Callable[[Elem], str] = str,
    ):
        self.carrier = tuple(carrier)
        self.name = name
        self.show = show
        self.bot, self.top, self.emp = bot, top, emp
        pairs = list(itertools.product(self.carrier, repeat=2))
        self._leq = {(a, b): bool(leq(a, b)) for a, b in pairs}
        self._meet = {(a, b): meet(a, b) for a, b in pairs}
        self._join = {(a, b): join(a, b) for a, b in pairs}
        self._impl = {(a, b): impl(a, b) for a, b in pairs}
        self._sep = {(a, b): sep(a, b) for a, b in pairs}
        self._wand = {(a, b): wand(a, b) for a, b in pairs}
        self._box = None if box is None else {a: box(a) for a in self.carrier}

    def elements(self) -> tuple[Elem, ...]:
        return self.carrier

    def __len__(self) -> int:
        return len(self.carrier)

    def leq(self, a, b) -> bool:
        return self._leq[a, b]

    def meet(self, a, b):
        return self._meet[a, b]

    def join(self, a, b):
        return self._join[a, b]

    def impl(self, a, b):
        return self._impl[a, b]

    def sep(self, a, b):
        return self._sep[a, b]

    def wand(self, a, b):
        return self._wand[a, b]

    @property
    def has_box(self) -> bool:
        return self._box is not None

    def box(self, a):
        if self._box is None:
            raise MalformedInput(f"{self.name} has no box")
        return self._box[a]

    def with_box(self, box: Callable | Mapping, name: str | None = None) -> FiniteBiAlgebra:
        """A copy of this algebra with the given box operation."""
        out = object.__new__(type(self))
        out.__dict__.update(self.__dict__)
        fn = box.__getitem__ if isinstance(box, Mapping) else box
        out._box = {a: fn(a) for a in self.carrier}
        out.name = name or f"{self.name}+box"
        return out

    def with_sep(self, a, b, value, name: str | None = None) -> FiniteBiAlgebra:
        """A copy with one entry of the sep table overwritten (negative controls)."""
        out = object.__new__(type(self))
        out.__dict__.update(self.__dict__)
        out._sep = dict(self._sep)
        out._sep[a, b] = value
        out.name = name or f"{self.name} (corrupted)"
        return out

    def __repr__(self) -> str:
        return f"<{self.name}: {len(self.carrier)} elements>"


@dataclass(frozen=True)
class FinitePcm:
    """Partial commutative monoid on ``elements`` with a partial ``table`` of products."""

    elements: tuple[str, ...]
    unit: str
    table: Mapping[tuple[str, str], str] = field(default_factory=dict)

    def __post_init__(self):
        problem = pcm_problem(self)
        if problem:
            raise MalformedInput(f"not a PCM: {problem}")

    def compose(self, x: str, y: str) -> str | None:
        if x == self.unit:
            return y
        if y == self.unit:
            return x
        return self.table.get((x, y))

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, x: str) -> int:
        return self.elements.index(x)

    def __str__(self) -> str:
        lines = ["elements " + " ".join(self.elements), f"unit {self.unit}"]
        done = set()
        for (x, y), z in sorted(self.table.items()):
            if (y, x) not in done and x != self.unit and y != self.unit:
                lines.append(f"{x}.{y}={z}")
                done.add((x, y))
        return "\n".join(lines)


def pcm_problem(p: FinitePcm) -> str | None:
    """Why ``p`` fails the PCM laws, or None."""
    els = set(p.elements)
    if len(els) != len(p.elements):
        return "duplicate elements"
    if p.unit not in els:
        return f"unit {p.unit} is not an element"
    for (x, y), z in p.table.items():
        if {x, y, z} - els:
            return f"product {x}.{y}={z} mentions an unknown element"
        if (x == p.unit and z != y) or (y == p.unit and z != x):
            return f"{x}.{y}={z} contradicts the unit"
    c = p.compose
    for x, y in itertools.product(p.elements, repeat=2):
        if c(x, y) != c(y, x):
            return f"not commutative at {x}, {y}"
    for x, y, z in itertools.product(p.elements, repeat=3):
        xy, yz = c(x, y), c(y, z)
        left = None if xy is None else c(xy, z)
        right = None if yz is None else c(x, yz)
        if left != right:
            return f"not associative at {x}, {y}, {z}"
    return None


def make_pcm(elements: Sequence[str], unit: str, products: Mapping[tuple[str, str], str]) -> FinitePcm:
    """Build a PCM, closing ``products`` under symmetry; conflicting entries are rejected."""
    table: dict[tuple[str, str], str] = {}
    for (x, y), z in products.items():
        for key in ((x, y), (y, x)):
            if table.get(key, z) != z:
                raise MalformedInput(f"conflicting products for {x}.{y}: {table[key]} and {z}")
            table[key] = z
    return FinitePcm(tuple(elements), unit, table)


def pcm_from_indices(n: int, table: Mapping[tuple[int, int], int]) -> FinitePcm:
    names = ["e"] + [f"m{i}" for i in range(1, n)]
    return make_pcm(names, "e", {(names[x], names[y]): names[z] for (x, y), z in table.items()})


def enumerate_pcms(n: int) -> list[FinitePcm]:
    """All PCMs with ``n`` elements, one per isomorphism class (unit named ``e``)."""
    others = list(range(1, n))
    pairs = [(x, y) for x in others for y in others if x <= y]
    seen = set()
    out = []
    for values in itertools.product([None] + list(range(n)), repeat=len(pairs)):
        table = {xy: v for xy, v in zip(pairs, values) if v is not None}
        full = {}
        for (x, y), z in table.items():
            full[x, y] = full[y, x] = z
        if not _assoc_ok(n, full):
            continue
        key = min(_encode(n, full, perm) for perm in itertools.permutations(others))
        if key in seen:
            continue
        seen.add(key)
        out.append(pcm_from_indices(n, {k: v for k, v in full.items() if k[0] <= k[1]}))
    return out


def _assoc_ok(n: int, t: Mapping[tuple[int, int], int]) -> bool:
    def c(x, y):
        if x is None or y is None:
            return None
        if x == 0:
            return y
        if y == 0:
            return x
        return t.get((x, y))

    return all(c(c(x, y), z) == c(x, c(y, z)) for x, y, z in itertools.product(range(n), repeat=3))


def _encode(n, t, perm):
    m = {0: 0}
    m.update({old: new for old, new in zip(range(1, n), perm)})
    inv = {t2: t1 for t1, t2 in m.items()}
    return tuple(
        m[t[inv[x], inv[y]]] if (inv[x], inv[y]) in t else -1 for x in range(1, n) for y in range(1, n)
    )


def all_pcms(max_size: int) -> list[FinitePcm]:
    return [p for n in range(1, max_size + 1) for p in enumerate_pcms(n)]


# ---------------------------------------------------------------------------
# Powerset algebras


def _bits(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


class PowersetOps:
    """The set-level operations on subsets (bitmasks) of a PCM's carrier."""

    def __init__(self, pcm: FinitePcm):
        self.pcm = pcm
        n = len(pcm)
        self.n = n
        self.full = (1 << n) - 1
        self.unit_mask = 1 << pcm.index(pcm.unit)
        els = pcm.elements
        # prod[i][j] is the index of els[i].els[j], or None
        self.prod = [[None if pcm.compose(x, y) is None else pcm.index(pcm.compose(x, y)) for y in els] for x in els]

    def masks(self) -> range:
        return range(self.full + 1)

    def dot(self, X: int, Y: int) -> int:
        """``X • Y``: all defined products."""
        out = 0
        for i in _bits(X):
            row = self.prod[i]
            for j in _bits(Y):
                k = row[j]
                if k is not None:
                    out |= 1 << k
        return out

    def lolli(self, X: int, Y: int) -> int:
        """``X −• Y``: the z whose defined products with members of X all land in Y."""
        out = 0
        for z in range(self.n):
            row = self.prod[z]
            if all(row[x] is None or Y >> row[x] & 1 for x in _bits(X)):
                out |= 1 << z
        return out

    def himpl(self, X: int, Y: int) -> int:
        """Largest Z with ``Z ∩ X ⊆ Y``, found by exhaustion."""
        best = 0
        for Z in self.masks():
            if Z & X & ~Y == 0:
                best |= Z
        return best

    def show(self, X: int) -> str:
        return "{" + ", ".join(self.pcm.elements[i] for i in _bits(X)) + "}"

    def parse_subset(self, names: Iterable[str]) -> int:
        mask = 0
        for name in names:
            if name not in self.pcm.elements:
                raise MalformedInput(f"unknown element {name!r}")
            mask |= 1 << self.pcm.index(name)
        return mask


class PowersetAlgebra(FiniteBiAlgebra):
    """All subsets of a PCM, with ∩, ∪, ⊃, {e}, • and −•."""

    def __init__(self, pcm: FinitePcm, name: str | None = None):
        ops = PowersetOps(pcm)
        self.ops = ops
        self.pcm = pcm
        super().__init__(
            carrier=list(ops.masks()),
            leq=lambda a, b: a & ~b == 0,
            bot=0,
            top=ops.full,
            meet=lambda a, b: a & b,
            join=lambda a, b: a | b,
            impl=ops.himpl,
            emp=ops.unit_mask,
            sep=ops.dot,
            wand=ops.lolli,
            name=name or f"P({'/'.join(pcm.elements)})",
            show=ops.show,
        )


def interior_box(alg: PowersetAlgebra, opens: Iterable[int]) -> Callable[[int], int]:
    """Interior of a family of open subsets: the union of the opens inside X."""
    opens = list(opens)

    def box(X: int) -> int:
        out = 0
        for U in opens:
            if U & ~X == 0:
                out |= U
        return out

    return box


def topologies(n: int) -> list[tuple[int, ...]]:
    """All topologies on an ``n``-point set, as sorted tuples of open masks."""
    full = (1 << n) - 1
    middle = list(range(1, full))
    out = []
    for r in range(len(middle) + 1):
        for chosen in itertools.combinations(middle, r):
            fam = {0, full, *chosen}
            if all(a | b in fam and a & b in fam for a in fam for b in fam):
                out.append(tuple(sorted(fam)))
    return out


def bis4_variants(alg: PowersetAlgebra, max_points: int = 3) -> list[FiniteBiAlgebra]:
    """Boxed copies of ``alg`` from every topology whose interior satisfies the BIS4 laws."""
    if alg.pcm and len(alg.pcm) > max_points:
        return [alg.with_box(lambda x: x, f"{alg.name}+id")]
    out = []
    for k, opens in enumerate(topologies(len(alg.pcm))):
        cand = alg.with_box(interior_box(alg, opens), f"{alg.name}+int{k}")
        if check_bis4_axioms(cand).ok:
            out.append(cand)
    return out


# ---------------------------------------------------------------------------
# Hand-built algebras


def chain_algebra(n: int) -> FiniteBiAlgebra:
    """The ``n``-element Heyting chain with ``* = /\\`` (so ``emp = top``); affine."""
    top = n - 1
    impl = lambda a, b: top if a <= b else b  # noqa: E731
    return FiniteBiAlgebra(range(n), lambda a, b: a <= b, 0, top, min, max, impl, top, min, impl, name=f"chain{n}")


def lukasiewicz_algebra(n: int) -> FiniteBiAlgebra:
    """The ``n``-element Łukasiewicz chain: truncated addition as ``*``; affine."""
    top = n - 1
    return FiniteBiAlgebra(
        range(n),
        lambda a, b: a <= b,
        0,
        top,
        min,
        max,
        lambda a, b: top if a <= b else b,
        top,
        lambda a, b: max(0, a + b - top),
        lambda a, b: min(top, top - a + b),
        name=f"luk{n}",
    )


# ---------------------------------------------------------------------------
# Interpretation


def interp_formula(f: Formula, alg: FiniteBiAlgebra, val: Mapping[str, Elem]):
    if isinstance(f, Atom):
        try:
            return val[f.name]
        except KeyError:
            raise MalformedInput(f"valuation misses atom {f.name}") from None
    if isinstance(f, Top):
        return alg.top
    if isinstance(f, Bot):
        return alg.bot
    if isinstance(f, Emp):
        return alg.emp
    if isinstance(f, Box):
        if not alg.has_box:
            raise MalformedInput(f"box formula in {alg.name}, which has no box")
        return alg.box(interp_formula(f.body, alg, val))
    a, b = interp_formula(f.left, alg, val), interp_formula(f.right, alg, val)
    if isinstance(f, And):
        return alg.meet(a, b)
    if isinstance(f, Or):
        return alg.join(a, b)
    if isinstance(f, Impl):
        return alg.impl(a, b)
    if isinstance(f, Sep):
        return alg.sep(a, b)
    if isinstance(f, Wand):
        return alg.wand(a, b)
    raise MalformedInput(f"unknown formula {f!r}")  # pragma: no cover


def interp_sequent(s: Sequent, alg: FiniteBiAlgebra, val: Mapping[str, Elem]) -> bool:
    """``⟦⌊Δ⌋⟧ ≤ ⟦φ⟧``."""
    return alg.leq(interp_formula(bunch_to_formula(s.lhs), alg, val), interp_formula(s.rhs, alg, val))


def sequent_atoms(s: Sequent) -> set[str]:
    return formula_atoms(bunch_to_formula(s.lhs)) | formula_atoms(s.rhs)


def random_valuations(alg: FiniteBiAlgebra, atoms: Iterable[str], count: int, seed: int = 0) -> list[dict[str, Elem]]:
    rng = random.Random(seed)
    atoms = sorted(atoms)
    carrier = list(alg.elements())
    return [{a: rng.choice(carrier) for a in atoms} for _ in range(count)]


def all_valuations(alg: FiniteBiAlgebra, atoms: Iterable[str]) -> Iterable[dict[str, Elem]]:
    atoms = sorted(atoms)
    for values in itertools.product(alg.elements(), repeat=len(atoms)):
        yield dict(zip(atoms, values))


# ---------------------------------------------------------------------------
# Axiom checks


@dataclass
class AxiomReport:
    name: str
    failures: list[tuple[str, tuple]] = field(default_factory=list)
    checked: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, law: str, witness: tuple):
        if all(law != name for name, _ in self.failures):
            self.failures.append((law, witness))

    def render(self, show: Callable = str) -> str:
        lines = [f"{self.name}: {'all laws hold' if self.ok else f'{len(self.failures)} law(s) fail'}"]
        for law in self.checked:
            bad = [w for name, w in self.failures if name == law]
            if bad:
                lines.append(f"  FAIL {law}: witness ({', '.join(show(x) for x in bad[0])})")
            else:
                lines.append(f"  ok   {law}")
        return "\n".join(lines)


def check_bi_axioms(alg: FiniteBiAlgebra) -> AxiomReport:
    """Exhaustively check the BI algebra laws; the first witness per law is kept."""
    rep = AxiomReport(alg.name)
    E = alg.elements()
    le, meet, join, impl, sep, wand = alg.leq, alg.meet, alg.join, alg.impl, alg.sep, alg.wand
    rep.checked = [
        "order reflexive",
        "order antisymmetric",
        "order transitive",
        "bounds",
        "meet is glb",
        "join is lub",
        "distributivity",
        "heyting residuation",
        "sep commutative",
        "sep associative",
        "sep unit",
        "sep monotone",
        "wand residuation",
    ]
    for a in E:
        if not le(a, a):
            rep.fail("order reflexive", (a,))
        if not (le(alg.bot, a) and le(a, alg.top)):
            rep.fail("bounds", (a,))
        if sep(a, alg.emp) != a:
            rep.fail("sep unit", (a,))
    for a, b in itertools.product(E, repeat=2):
        if a != b and le(a, b) and le(b, a):
            rep.fail("order antisymmetric", (a, b))
        m, j = meet(a, b), join(a, b)
        if not (le(m, a) and le(m, b)):
            rep.fail("meet is glb", (a, b))
        if not (le(a, j) and le(b, j)):
            rep.fail("join is lub", (a, b))
        if sep(a, b) != sep(b, a):
            rep.fail("sep commutative", (a, b))
    for a, b, c in itertools.product(E, repeat=3):
        if le(a, b) and le(b, c) and not le(a, c):
            rep.fail("order transitive", (a, b, c))
        if le(c, a) and le(c, b) and not le(c, meet(a, b)):
            rep.fail("meet is glb", (a, b, c))
        if le(a, c) and le(b, c) and not le(join(a, b), c):
            rep.fail("join is lub", (a, b, c))
        if meet(a, join(b, c)) != join(meet(a, b), meet(a, c)):
            rep.fail("distributivity", (a, b, c))
        if le(meet(a, b), c) != le(a, impl(b, c)):
            rep.fail("heyting residuation", (a, b, c))
        if sep(sep(a, b), c) != sep(a, sep(b, c)):
            rep.fail("sep associative", (a, b, c))
        if le(a, b) and not le(sep(a, c), sep(b, c)):
            rep.fail("sep monotone", (a, b, c))
        if le(sep(a, b), c) != le(a, wand(b, c)):
            rep.fail("wand residuation", (a, b, c))
    return rep


BIS4_LAWS = [
    "box monotone",
    "(1) box p <= p",
    "(2) box p <= box box p",
    "(3) top = box top",
    "(4) emp = box emp",
    "(5) box p /\\ box q <= box (p /\\ q)",
    "(6) box p * box q <= box (p * q)",
]


def check_bis4_axioms(alg: FiniteBiAlgebra) -> AxiomReport:
    rep = AxiomReport(f"{alg.name} (box)")
    rep.checked = list(BIS4_LAWS)
    if not alg.has_box:
        rep.fail("box monotone", ())
        return rep
    E, le, box = alg.elements(), alg.leq, alg.box
    for p in E:
        if not le(box(p), p):
            rep.fail(BIS4_LAWS[1], (p,))
        if not le(box(p), box(box(p))):
            rep.fail(BIS4_LAWS[2], (p,))
    if box(alg.top) != alg.top:
        rep.fail(BIS4_LAWS[3], (alg.top,))
    if box(alg.emp) != alg.emp:
        rep.fail(BIS4_LAWS[4], (alg.emp,))
    for p, q in itertools.product(E, repeat=2):
        if le(p, q) and not le(box(p), box(q)):
            rep.fail(BIS4_LAWS[0], (p, q))
        if not le(alg.meet(box(p), box(q)), box(alg.meet(p, q))):
            rep.fail(BIS4_LAWS[5], (p, q))
        if not le(alg.sep(box(p), box(q)), box(alg.sep(p, q))):
            rep.fail(BIS4_LAWS[6], (p, q))
    return rep


# ---------------------------------------------------------------------------
# Soundness harness


@dataclass
class SoundnessResult:
    ok: bool
    witness: dict | None = None
    skipped: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def model_applicable(alg: FiniteBiAlgebra, rules: RuleSet, s4: bool) -> str | None:
    """None when ``alg`` is a model of the calculus, else the reason it is not."""
    if s4 and not alg.has_box:
        return "algebra has no box"
    for i, r in enumerate(rules):
        env = find_rule_violation(alg, r)
        if env is not None:
            return f"algebra does not validate rule #{i} ({r})"
    return None


def soundness_check(d, alg: FiniteBiAlgebra, val: Mapping[str, Elem], rules: RuleSet = RuleSet(), s4: bool = False) -> SoundnessResult:
    """Whether the conclusion of the (checked) derivation ``d`` holds in ``alg`` under ``val``."""
    reason = model_applicable(alg, rules, s4)
    if reason:
        return SoundnessResult(True, skipped=reason)
    if interp_sequent(d.conclusion, alg, val):
        return SoundnessResult(True)
    return SoundnessResult(
        False,
        {"sequent": str(d.conclusion), "algebra": alg.name, "valuation": {k: alg.show(v) for k, v in val.items()}},
    )


def find_countermodel(
    s: Sequent, algebras: Iterable[FiniteBiAlgebra], exhaustive_limit: int = 4096, samples: int = 64
) -> tuple[FiniteBiAlgebra, dict] | None:
    """An algebra and valuation falsifying ``s``, if one exists among those tried."""
    atoms = sequent_atoms(s)
    for alg in algebras:
        if len(alg) ** len(atoms) <= exhaustive_limit:
            vals: Iterable = all_valuations(alg, atoms)
        else:
            vals = random_valuations(alg, atoms, samples, seed=len(atoms))
        for v in vals:
            if not interp_sequent(s, alg, v):
                return alg, v
    return None


# ---------------------------------------------------------------------------
# File formats


def parse_pcm(text: str) -> FinitePcm:
    """``elements e m n`` / ``unit e`` / ``m.n=k`` lines; ``#`` starts a comment."""
    elements = None
    unit = None
    products = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("elements"):
            elements = line.split()[1:]
        elif line.startswith("unit"):
            parts = line.split()
            if len(parts) != 2:
                raise MalformedInput(f"line {lineno}: expected 'unit <name>'")
            unit = parts[1]
        elif "=" in line and "." in line.split("=")[0]:
            lhs, rhs = (s.strip() for s in line.split("=", 1))
            x, y = (s.strip() for s in lhs.split(".", 1))
            if (x, y) in products and products[x, y] != rhs:
                raise MalformedInput(f"line {lineno}: conflicting products for {x}.{y}")
            products[x, y] = rhs
        else:
            raise MalformedInput(f"line {lineno}: cannot read {line!r}")
    if not elements:
        raise MalformedInput("PCM file lacks an 'elements' line")
    if unit is None:
        raise MalformedInput("PCM file lacks a 'unit' line")
    return make_pcm(elements, unit, products)


def load_pcm(path) -> FinitePcm:
    with open(path, encoding="utf-8") as fh:
        return parse_pcm(fh.read())


def parse_subset_text(text: str) -> list[str]:
    """``{a, b}``, ``a, b`` or ``{}``."""
    body = text.strip()
    if body.startswith("{") and body.endswith("}"):
        body = body[1:-1]
    return [x.strip() for x in body.split(",") if x.strip()]


def parse_valuation(text: str, ops: PowersetOps) -> dict[str, int]:
    """Lines ``a = {m, e}``."""
    val = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise MalformedInput(f"line {lineno}: expected 'atom = {{...}}'")
        atom, subset = line.split("=", 1)
        val[atom.strip()] = ops.parse_subset(parse_subset_text(subset))
    return val
