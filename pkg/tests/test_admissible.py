import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bunched import calculus as K
from bunched.admissible import (
    box_idemp_inv,
    box_idemp_leaf,
    collapse_inv,
    identity_expansion,
    invert_all,
    invert_and_l,
    invert_emp_l,
    invert_impl_r,
    invert_sep_l,
    invert_true_l,
    invert_wand_r,
)
from bunched.calculus import BI, BIS4, check_derivation
from bunched.corpus import AFFINE_CFG, formulas_up_to_depth, inversion_inputs
from bunched.errors import MalformedInput
from bunched.parsing import parse_bunch, parse_formula, parse_sequent
from bunched.search import prove_cf
from bunched.syntax import (
    EMPA,
    EMPM,
    IDENTITY,
    And,
    Atom,
    BunchCtx,
    Comma,
    CommaR,
    Leaf,
    Semi,
    Sep,
    Sequent,
    box_bunch,
    bunch_to_formula,
    focus,
    formula_positions,
    formula_size,
)

from strategies import bunches, formulas


# identity expansion ------------------------------------------------------------


def check_identity(f, s4):
    d = identity_expansion(f, s4=s4)
    assert d.conclusion == Sequent(Leaf(f), f)
    assert d.is_cut_free()
    assert d.height <= 2 * formula_size(f)
    assert check_derivation(d, BIS4 if s4 else BI)


def test_identity_on_all_depth_one_formulas():
    for f in formulas_up_to_depth(1):
        check_identity(f, False)
    for f in formulas_up_to_depth(1, s4=True):
        check_identity(f, True)


@given(formulas(boxes=False))
def test_identity_plain(f):
    check_identity(f, False)


@given(formulas())
def test_identity_s4(f):
    check_identity(f, True)


def test_identity_box_needs_s4():
    with pytest.raises(MalformedInput):
        identity_expansion(parse_formula("box a"))


# inversions on random derivations ------------------------------------------------


def leaf_replaced(d, ctx, replacement):
    return Sequent(ctx.fill(replacement), d.rhs)


SHAPES = {
    "sep": (invert_sep_l, lambda f: Comma(Leaf(f.left), Leaf(f.right)), BI),
    "and": (invert_and_l, lambda f: Semi(Leaf(f.left), Leaf(f.right)), BI),
    "top": (invert_true_l, lambda f: EMPA, BI),
    "emp": (invert_emp_l, lambda f: EMPM, BI),
    "boxbox": (box_idemp_leaf, lambda f: Leaf(f.body), BIS4),
}


CASES = [(shape, "plain") for shape in sorted(SHAPES)] + [(shape, "affine") for shape in ("and", "emp", "sep", "top")]


@pytest.mark.parametrize("shape, cfg_name", CASES)
def test_inversion_contracts(shape, cfg_name):
    invert, replacement, cfg = SHAPES[shape]
    if cfg_name == "affine":
        cfg = AFFINE_CFG
    for d, ctx in inversion_inputs(shape, 120, cfg, seed=42):
        out = invert(d, ctx, cfg.struct_rules)
        principal = focus(d.lhs, ctx).formula
        assert out.conclusion == leaf_replaced(d, ctx, replacement(principal))
        assert out.is_cut_free()
        assert out.height <= d.height
        assert check_derivation(out, cfg)


def test_sep_l_at_the_root_strictly_decreases():
    d = prove_cf(parse_sequent("a * b |- b * a"), BI, 6)
    assert d.rule is K.Rule.SEP_L
    out = invert_sep_l(d, IDENTITY)
    assert out.height < d.height


def test_strict_decrease_fails_on_false_left():
    # a principal formula sitting in the context of a leaf rule: both heights are 0
    d = K.false_l(BunchCtx((CommaR(Leaf(parse_formula("p * q"))),)), Atom("a"))
    ctx = formula_positions(d.lhs)[1][0]
    out = invert_sep_l(d, ctx)
    assert d.height == out.height == 0
    assert check_derivation(out, BI)


def test_strict_decrease_fails_on_weakening():
    # a ; (p * q) |- a by weakening has height 1; so has a ; (p , q) |- a
    d = K.weaken_semi(K.ax("a"), IDENTITY, parse_bunch("p * q"))
    out = invert_sep_l(d, formula_positions(d.lhs)[1][0])
    assert out.conclusion == parse_sequent("a ; (p , q) |- a")
    assert out.height == d.height == 1


def test_contraction_case_applies_the_inversion_twice():
    # ((a * b) ; (a * b)) , c contracted to (a * b) , c
    inner = K.sep_r(K.sep_l(K.sep_r(K.ax("a"), K.ax("b")), IDENTITY), K.ax("c"))
    ctx = BunchCtx((CommaR(Leaf(Atom("c"))),))
    d = K.contract_semi(K.weaken_semi(inner, ctx, parse_bunch("a * b")), ctx)
    out = invert_sep_l(d, formula_positions(d.lhs)[0][0])
    assert out.conclusion == parse_sequent("(a , b) , c |- (a * b) * c")
    assert check_derivation(out, BI) and out.height < d.height


def test_invert_with_struct_ext():
    d = K.struct_ext([K.ax("a")], Atom("a"), IDENTITY, 0, AFFINE_CFG.struct_rules[0], {1: Leaf(Atom("a")), 2: Leaf(parse_formula("b * c"))})
    out = invert_sep_l(d, formula_positions(d.lhs)[1][0], AFFINE_CFG.struct_rules)
    assert out.conclusion == parse_sequent("a , (b , c) |- a")
    assert check_derivation(out, AFFINE_CFG)


def test_inversion_errors():
    d = K.ax("a")
    with pytest.raises(MalformedInput):
        invert_sep_l(d, IDENTITY)
    with pytest.raises(MalformedInput):
        invert_and_l(d, BunchCtx((CommaR(Leaf(Atom("a"))),)))
    with pytest.raises(MalformedInput):
        invert_wand_r(d)


# right inversions, collapse and boxes ---------------------------------------------


@pytest.mark.parametrize(
    "text, invert, expected",
    [
        ("b |- a -* a * b", invert_wand_r, "b , a |- a * b"),
        ("a ; b |- b -> a", invert_impl_r, "(a ; b) ; b |- a"),
        ("emp |- a -* a", invert_wand_r, "emp , a |- a"),
        ("bot |- a -> b", invert_impl_r, "bot ; a |- b"),
    ],
)
def test_right_inversions(text, invert, expected):
    d = prove_cf(parse_sequent(text), BI, 8)
    out = invert(d)
    assert out.conclusion == parse_sequent(expected)
    assert check_derivation(out, BI)


@given(bunches(leaf_formulas=st.sampled_from([Atom("a"), Atom("b")]), max_leaves=5))
@settings(max_examples=60, deadline=None)
def test_collapse_inverse(delta):
    f = bunch_to_formula(delta)
    d = identity_expansion(f)
    out = collapse_inv(d, IDENTITY, delta)
    assert out.conclusion == Sequent(delta, f)
    assert check_derivation(out, BI)
    assert out.height <= d.height


def test_box_idemp_on_a_bunch():
    delta = parse_bunch("a , (b ; c)")
    double = box_bunch(box_bunch(delta))
    d = identity_expansion(bunch_to_formula(double), s4=True)
    d = collapse_inv(d, IDENTITY, double)
    out = box_idemp_inv(d, IDENTITY, delta)
    assert out.conclusion.lhs == box_bunch(delta)
    assert out.height <= d.height
    assert check_derivation(out, BIS4)
    with pytest.raises(MalformedInput):
        box_idemp_inv(d, IDENTITY, parse_bunch("a"))


def test_invert_all():
    d = identity_expansion(parse_formula("(a * b) * (c * a)"))
    out = invert_all(d, Sep)
    assert not any(isinstance(f, Sep) for _, f in formula_positions(out.lhs))
    assert check_derivation(out, BI)
    assert invert_all(K.ax("a"), And) == K.ax("a")
