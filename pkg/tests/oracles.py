"""Brute-force reference implementations used as test oracles.

Trees are navigated by child index (0 = left, 1 = right) and edited by
direct reconstruction, independently of the zipper code under test.
"""

from __future__ import annotations

import itertools

from bunched.bterm import TComma, TSemi, Var
from bunched.syntax import EMPA, EMPM, Atom, Box, Comma, Leaf, Semi

HOLE = Leaf(Atom("hole"))


def children(b):
    return (b.left, b.right) if isinstance(b, (Comma, Semi)) else ()


def nodes(b, path=()):
    """Every ``(path, subtree)`` in preorder."""
    yield path, b
    for i, c in enumerate(children(b)):
        yield from nodes(c, path + (i,))


def subtree(b, path):
    for i in path:
        b = children(b)[i]
    return b


def replace_at(b, path, new):
    if not path:
        return new
    kids = list(children(b))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return type(b)(*kids)


def tokens(b, path) -> str:
    """The frame-path string for ``path``: L/R for the side, then the node's connective."""
    out = []
    for i in path:
        out.append(("L" if i == 0 else "R") + ("," if isinstance(b, Comma) else ";"))
        b = children(b)[i]
    return "".join(out)


def brute_decompositions(b):
    """Multiset of ``(b with one node replaced by HOLE, that node)``."""
    return sorted(((replace_at(b, p, HOLE), sub) for p, sub in nodes(b)), key=repr)


def formula_leaf_paths(b):
    return [(p, sub.formula) for p, sub in nodes(b) if isinstance(sub, Leaf)]


def brute_box(b):
    if isinstance(b, Leaf):
        return Leaf(Box(b.formula))
    if isinstance(b, (Comma, Semi)):
        return type(b)(brute_box(b.left), brute_box(b.right))
    return b


# bunched terms ---------------------------------------------------------------


def linear_terms(max_size: int):
    """Linear terms whose variables are x1..xk in left-to-right order, up to renaming."""
    shapes = {}

    def shapes_of(n):  # binary trees with n leaves, connective-labelled
        if n in shapes:
            return shapes[n]
        if n == 1:
            shapes[n] = [None]
            return shapes[n]
        out = []
        for k in range(1, n):
            for l, r in itertools.product(shapes_of(k), shapes_of(n - k)):
                out.append((",", l, r))
                out.append((";", l, r))
        shapes[n] = out
        return out

    def number(shape, start):
        if shape is None:
            return Var(start), start + 1
        op, l, r = shape
        lt, nxt = number(l, start)
        rt, nxt = number(r, nxt)
        return (TComma if op == "," else TSemi)(lt, rt), nxt

    terms = []
    for leaves in range(1, (max_size + 1) // 2 + 1):
        for shape in shapes_of(leaves):
            terms.append(number(shape, 1)[0])
    return terms


def term_size(t) -> int:
    return 1 if isinstance(t, Var) else 1 + term_size(t.left) + term_size(t.right)


def brute_subst(t, env):
    """Instantiate ``t``, also returning the path at which each variable lands."""
    if isinstance(t, Var):
        return env[t.index], {t.index: ()}
    left, lp = brute_subst(t.left, env)
    right, rp = brute_subst(t.right, env)
    where = {k: (0,) + v for k, v in lp.items()}
    where.update({k: (1,) + v for k, v in rp.items()})
    return (Comma if isinstance(t, TComma) else Semi)(left, right), where


SMALL_GAMMAS = (Leaf(Atom("c")), EMPM, EMPA, Comma(Leaf(Atom("c")), EMPA))
