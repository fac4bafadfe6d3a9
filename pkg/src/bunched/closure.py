"""Moore closures on a PCM powerset and the BI algebra of closed sets.

The closure is always computed from a basis of closed sets, ``cl(X)`` being
the intersection of the basis sets that contain ``X``; the closed family is
derived from it, never the other way round.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .algebra import FiniteBiAlgebra, FinitePcm, PowersetOps, parse_subset_text
from .errors import MalformedInput


@dataclass(frozen=True)
class Basis:
    pcm: FinitePcm
    sets: tuple[int, ...]  # bitmasks over pcm.elements


class RefusedConstruction(Exception):
    """The closed sets do not form a BI algebra; ``witness`` shows why."""

    def __init__(self, reason: str, witness: tuple):
        self.reason = reason
        self.witness = witness
        super().__init__(f"{reason}: {witness}")


class MooreClosure:
    def __init__(self, basis: Basis):
        self.basis = basis
        self.ops = PowersetOps(basis.pcm)
        self.full = self.ops.full
        self._cl = [self._compute_cl(X) for X in self.ops.masks()]

    def _compute_cl(self, X: int) -> int:
        out = self.full
        for B in self.basis.sets:
            if X & ~B == 0:
                out &= B
        return out

    def cl(self, X: int) -> int:
        return self._cl[X]

    @cached_property
    def closed(self) -> tuple[int, ...]:
        return tuple(X for X in self.ops.masks() if self._cl[X] == X)

    def is_closed(self, X: int) -> bool:
        return self._cl[X] == X

    def interior(self, X: int) -> int:
        """``cl`` of the union of the closed subsets of ``X``."""
        union = 0
        for C in self.closed:
            if C & ~X == 0:
                union |= C
        return self.cl(union)

    def show(self, X: int) -> str:
        return self.ops.show(X)


def cl(mc: MooreClosure, X: int) -> int:
    return mc.cl(X)


def closed_sets(mc: MooreClosure) -> list[int]:
    return list(mc.closed)


def closed_by_intersections(basis: Basis) -> list[int]:
    """Intersections of every subfamily of the basis (the empty one gives the full set)."""
    full = (1 << len(basis.pcm)) - 1
    found = set()
    sets = list(dict.fromkeys(basis.sets))
    for r in range(len(sets) + 1):
        for fam in itertools.combinations(sets, r):
            acc = full
            for B in fam:
                acc &= B
            found.add(acc)
    return sorted(found)


def strength_violation(mc: MooreClosure) -> tuple[int, int] | None:
    dot, c = mc.ops.dot, mc.cl
    for X, Y in itertools.product(mc.ops.masks(), repeat=2):
        if dot(c(X), Y) & ~c(dot(X, Y)):
            return X, Y
    return None


def is_strong(mc: MooreClosure) -> bool:
    """``cl(X) • Y ⊆ cl(X • Y)`` for all subsets X, Y."""
    return strength_violation(mc) is None


def ideal_violation(mc: MooreClosure) -> tuple[int, int] | None:
    lolli = mc.ops.lolli
    for X in mc.ops.masks():
        for Y in mc.closed:
            if not mc.is_closed(lolli(X, Y)):
                return X, Y
    return None


def exponential_ideal(mc: MooreClosure) -> bool:
    """``X −• Y`` is closed for every subset X and closed Y."""
    return ideal_violation(mc) is None


def interior(mc: MooreClosure, X: int) -> int:
    return mc.interior(X)


def heyting_violation(mc: MooreClosure) -> tuple[int, int] | None:
    """Closed X, Y for which ``int(X ⊃ Y)`` is not the relative pseudo-complement in the closed sets."""
    himpl = mc.ops.himpl
    for X, Y in itertools.product(mc.closed, repeat=2):
        Z = mc.interior(himpl(X, Y))
        if not mc.is_closed(Z) or Z & X & ~Y:
            return X, Y
        for W in mc.closed:
            if (W & X & ~Y == 0) != (W & ~Z == 0):
                return X, Y
    return None


def distributivity_violation(mc: MooreClosure) -> tuple[int, int, int] | None:
    c = mc.cl
    for X, Y, Z in itertools.product(mc.closed, repeat=3):
        if X & c(Y | Z) != c((X & Y) | (X & Z)):
            return X, Y, Z
    return None


class ClosedSetAlgebra(FiniteBiAlgebra):
    def __init__(self, mc: MooreClosure):
        self.closure = mc
        c, ops = mc.cl, mc.ops
        super().__init__(
            carrier=mc.closed,
            leq=lambda a, b: a & ~b == 0,
            bot=c(0),
            top=mc.full,
            meet=lambda a, b: a & b,
            join=lambda a, b: c(a | b),
            impl=lambda a, b: mc.interior(ops.himpl(a, b)),
            emp=c(ops.unit_mask),
            sep=lambda a, b: c(ops.dot(a, b)),
            wand=lambda a, b: c(ops.lolli(a, b)),
            name=f"C({len(mc.closed)} closed sets over {'/'.join(mc.basis.pcm.elements)})",
            show=ops.show,
        )


def build_closed_algebra(mc: MooreClosure) -> ClosedSetAlgebra:
    """The closed sets as a BI algebra; refused, with a witness, when a hypothesis fails."""
    w = strength_violation(mc)
    if w is not None:
        raise RefusedConstruction("closure is not strong", w)
    w = distributivity_violation(mc)
    if w is not None:
        raise RefusedConstruction("closed sets are not distributive", w)
    w = heyting_violation(mc)
    if w is not None:
        raise RefusedConstruction("closed sets lack a Heyting implication", w)
    return ClosedSetAlgebra(mc)


def enumerate_bases(pcm: FinitePcm):
    """Every family of subsets of the carrier, as a basis."""
    n = len(pcm)
    masks = range(1 << n)
    for bits in range(1 << (1 << n)):
        yield Basis(pcm, tuple(m for m in masks if bits >> m & 1))


def parse_basis(text: str, pcm: FinitePcm) -> Basis:
    """One subset per line, element names separated by commas; ``{}`` is the empty set."""
    ops = PowersetOps(pcm)
    sets = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            sets.append(ops.parse_subset(parse_subset_text(line)))
        except MalformedInput as e:
            raise MalformedInput(f"line {lineno}: {e}") from None
    return Basis(pcm, tuple(sets))


def load_basis(path, pcm: FinitePcm) -> Basis:
    with open(path, encoding="utf-8") as fh:
        return parse_basis(fh.read(), pcm)
