import pytest

from bunched import calculus as K
from bunched.calculus import BI, check_derivation
from bunched.corpus import FAMILY_CONFIGS, SEARCH_REGRESSION
from bunched.parsing import parse_sequent
from bunched.search import Prover, SearchOptions, cut_eliminate, prove_cf
from bunched.syntax import IDENTITY


@pytest.mark.parametrize("text, family, provable", SEARCH_REGRESSION)
def test_regression(text, family, provable):
    cfg = FAMILY_CONFIGS[family]
    s = parse_sequent(text)
    d = prove_cf(s, cfg, 12)
    assert (d is not None) == provable
    if d is not None:
        assert d.conclusion == s
        assert d.is_cut_free()
        assert check_derivation(d, cfg)


def test_saturation_preserves_provability():
    plain = SearchOptions(saturate=False)
    for text, family, provable in SEARCH_REGRESSION:
        d = prove_cf(parse_sequent(text), FAMILY_CONFIGS[family], 12, plain)
        assert (d is not None) == provable, text


def test_without_model_pruning():
    # pruning is only an optimisation: the outcome is the same at a small depth
    opts = SearchOptions(prune_with_models=False)
    for text, family, provable in SEARCH_REGRESSION[:20]:
        if family != "bi":
            continue
        d = prove_cf(parse_sequent(text), BI, 7, opts)
        if d is not None:
            assert provable and check_derivation(d, BI)


def test_contraction_bound():
    s = parse_sequent("a |- a /\\ a")
    assert prove_cf(s, BI, 12, SearchOptions(contraction_bound=0)) is None
    assert prove_cf(s, BI, 12, SearchOptions(contraction_bound=1)) is not None


def test_depth_budget():
    s = parse_sequent("(a -* b) * (b -* c) |- a -* c")
    assert prove_cf(s, BI, 3) is None
    assert prove_cf(s, BI, 12) is not None


def test_search_is_deterministic():
    s = parse_sequent("(a -> b) ; (b -> c) |- a -> c")
    assert prove_cf(s, BI, 12) == prove_cf(s, BI, 12)


def test_refutation_by_countermodel():
    p = Prover(BI)
    assert p.is_refuted(parse_sequent("a * b |- a"))
    assert not p.is_refuted(parse_sequent("a * b |- b * a"))


def test_cut_eliminate():
    left = K.disj_r1(K.ax("a"), parse_sequent("a |- b").rhs)
    right = prove_cf(parse_sequent("a \\/ b |- b \\/ a"), BI, 8)
    d = K.cut(left, right, IDENTITY)
    out = cut_eliminate(d, BI, 12)
    assert out.is_cut_free() and out.conclusion == d.conclusion
    assert check_derivation(out, BI)
    assert cut_eliminate(left, BI, 12) is left
