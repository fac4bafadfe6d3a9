import itertools

import pytest

from bunched.algebra import (
    BIS4_LAWS,
    PowersetAlgebra,
    PowersetOps,
    all_pcms,
    all_valuations,
    bis4_variants,
    chain_algebra,
    check_bi_axioms,
    check_bis4_axioms,
    enumerate_pcms,
    find_countermodel,
    interp_formula,
    interp_sequent,
    lukasiewicz_algebra,
    make_pcm,
    parse_pcm,
    parse_valuation,
    random_valuations,
    soundness_check,
    topologies,
)
from bunched.calculus import BI
from bunched.corpus import all_bunches
from bunched.errors import MalformedInput
from bunched.parsing import parse_sequent
from bunched.search import prove_cf
from bunched.syntax import Atom, bunch_to_formula, normalize


def brute_pcm_count(n):
    """PCMs on {0..n-1} with unit 0, up to relabelling the other elements."""
    others = list(range(1, n))
    pairs = [(x, y) for x in others for y in others if x <= y]
    seen = set()
    for values in itertools.product([None] + list(range(n)), repeat=len(pairs)):
        t = {}
        for (x, y), v in zip(pairs, values):
            t[x, y] = t[y, x] = v

        def c(x, y):
            if x is None or y is None:
                return None
            if x == 0:
                return y
            if y == 0:
                return x
            return t[x, y]

        if any(c(x, 0) != x for x in range(n)):
            continue
        if not all(c(c(x, y), z) == c(x, c(y, z)) for x, y, z in itertools.product(range(n), repeat=3)):
            continue

        def relabelled(perm):
            r = lambda v: -1 if v is None else relabel(perm, v)  # noqa: E731
            return tuple(sorted(((r(x), r(y)), r(t[x, y])) for x in others for y in others))

        canon = min(relabelled(perm) for perm in itertools.permutations(others))
        seen.add(canon)
    return len(seen)


def relabel(perm, x):
    return 0 if x == 0 else perm[x - 1]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pcm_enumeration_matches_brute_force(n):
    assert len(enumerate_pcms(n)) == brute_pcm_count(n)


def test_pcm_validation():
    with pytest.raises(MalformedInput):
        make_pcm(["e", "m"], "e", {("m", "m"): "e", ("m", "e"): "e"})
    # m.m = n with n.m undefined is associative: both bracketings are undefined
    make_pcm(["e", "m", "n"], "e", {("m", "m"): "n"})
    with pytest.raises(MalformedInput):  # (m.m).n = n.n = n but m.n is undefined
        make_pcm(["e", "m", "n"], "e", {("m", "m"): "n", ("n", "n"): "n"})


def test_every_small_powerset_is_a_bi_algebra():
    for pcm in all_pcms(4):
        report = check_bi_axioms(PowersetAlgebra(pcm))
        assert report.ok, report.render()


def test_hand_built_algebras_are_bi_algebras():
    for alg in [chain_algebra(2), chain_algebra(4), lukasiewicz_algebra(3), lukasiewicz_algebra(5)]:
        assert check_bi_axioms(alg).ok


def test_corrupted_table_is_detected():
    alg = PowersetAlgebra(make_pcm(["e", "m"], "e", {("m", "m"): "m"}))
    bad = alg.with_sep(1, 2, 3)
    report = check_bi_axioms(bad)
    assert not report.ok
    assert "FAIL" in report.render()


def test_magic_wand_into_the_empty_set():
    # with m.m undefined, {m} -* {} = {m}
    pcm = make_pcm(["e", "m"], "e", {})
    ops = PowersetOps(pcm)
    m = ops.parse_subset(["m"])
    assert ops.lolli(m, 0) == m
    assert ops.dot(m, m) == 0


def test_heyting_implication_is_the_largest_residual():
    ops = PowersetOps(make_pcm(["e", "x", "y", "xy"], "e", {("x", "y"): "xy"}))
    for X, Y in itertools.product(ops.masks(), repeat=2):
        Z = ops.himpl(X, Y)
        assert Z == (~X | Y) & ops.full


def test_interp_respects_equivalence():
    algs = [PowersetAlgebra(p) for p in all_pcms(2)] + [chain_algebra(3)]
    for alg in algs:
        vals = list(all_valuations(alg, ["a", "b"]))
        for b in all_bunches(5):
            f, g = bunch_to_formula(b), bunch_to_formula(normalize(b))
            for v in vals:
                assert interp_formula(f, alg, v) == interp_formula(g, alg, v)


def test_affine_inequality():
    p_star_q_le_p = parse_sequent("p * q |- p")
    for alg in [chain_algebra(3), lukasiewicz_algebra(4)]:
        assert all(interp_sequent(p_star_q_le_p, alg, v) for v in all_valuations(alg, ["p", "q"]))
    heap = PowersetAlgebra(make_pcm(["e", "x", "y", "xy"], "e", {("x", "y"): "xy"}))
    assert not all(interp_sequent(p_star_q_le_p, heap, v) for v in all_valuations(heap, ["p", "q"]))


def test_topologies_count():
    assert [len(topologies(n)) for n in (1, 2, 3)] == [1, 4, 29]


def test_bis4_variants_pass_the_box_laws():
    for pcm in all_pcms(3):
        for alg in bis4_variants(PowersetAlgebra(pcm)):
            report = check_bis4_axioms(alg)
            assert report.ok and check_bi_axioms(alg).ok
    assert len(BIS4_LAWS) >= 5


def test_non_idempotent_box_is_rejected():
    alg = chain_algebra(3).with_box(lambda x: max(0, x - 1))
    assert not check_bis4_axioms(alg).ok


def test_soundness_check_and_countermodels():
    d = prove_cf(parse_sequent("a * b |- b * a"), BI, 6)
    for pcm in all_pcms(3):
        alg = PowersetAlgebra(pcm)
        for v in random_valuations(alg, ["a", "b"], 20, seed=1):
            assert soundness_check(d, alg, v)
    found = find_countermodel(parse_sequent("a |- a * a"), [PowersetAlgebra(p) for p in all_pcms(2)])
    assert found is not None
    alg, val = found
    assert not interp_sequent(parse_sequent("a |- a * a"), alg, val)


def test_random_valuations_are_reproducible():
    alg = chain_algebra(4)
    assert random_valuations(alg, ["a", "b"], 5, seed=3) == random_valuations(alg, ["a", "b"], 5, seed=3)


def test_pcm_and_valuation_files():
    pcm = parse_pcm("# heap cells\nelements e x y xy\nunit e\nx.y=xy\n")
    assert pcm.compose("y", "x") == "xy" and pcm.compose("x", "x") is None
    assert parse_pcm(str(pcm)) == pcm
    ops = PowersetOps(pcm)
    val = parse_valuation("a = {x, y}\nb = {}\n", ops)
    assert ops.show(val["a"]) == "{x, y}" and val["b"] == 0
    for bad in ["unit e\n", "elements e m\nunit z\n", "elements e m\nunit e\nm.m\n"]:
        with pytest.raises(MalformedInput):
            parse_pcm(bad)
    with pytest.raises(MalformedInput):
        parse_valuation("a {x}", ops)
    with pytest.raises(MalformedInput):
        parse_valuation("a = {q}", ops)


def test_missing_atom_in_valuation():
    with pytest.raises(MalformedInput):
        interp_formula(Atom("z"), chain_algebra(2), {})
