import random

from hypothesis import given, settings
from hypothesis import strategies as st

from pdga.algebra import check_cdga, classify, pairing_from_orientation
from pdga.corpus import cp2_sum, exterior, random_pdga, v2
from pdga.hodge import hodge_decomposition, nondeg_quotient, standard_homotopy
from pdga.trees import (
    BLACK,
    WHITE,
    ColoredTree,
    GradedSpan,
    as_cdga,
    closure_span,
    enumerate_trees,
    eval_tree,
    parse_tree,
    small_subalgebra,
    tree_span,
    verify_closure,
)


def decomposed(a, o):
    hd, tw, _ = hodge_decomposition(a, pairing_from_orientation(a, o))
    assert tw.feasible
    return hd, standard_homotopy(hd).h


def random_hodge(seed):
    rng = random.Random(seed)
    while True:
        a, o, _ = random_pdga(rng)
        hd, tw, _ = hodge_decomposition(a, pairing_from_orientation(a, o))
        if tw.feasible:
            return a, o, hd, standard_homotopy(hd).h


def test_tree_counts():
    assert len(list(enumerate_trees(1))) == 1
    assert len(list(enumerate_trees(2))) == 2
    assert len(list(enumerate_trees(3))) == 2 * 4
    # Catalan(l-1) shapes times 2^(l-1) internal colorings
    assert len(list(enumerate_trees(4))) == 5 * 8
    assert list(enumerate_trees(3, max_out_degree=3, leaf_degrees=[2])) == []
    # only the all-black coloring of each of the two shapes reaches degree 4
    assert len(list(enumerate_trees(3, max_out_degree=4, leaf_degrees=[2]))) == 2


def test_serialization_is_injective_and_parses():
    seen = set()
    for l in range(1, 6):
        for t in enumerate_trees(l):
            s = t.serialize()
            assert s not in seen
            seen.add(s)
            assert parse_tree(s) == t
    t = ColoredTree(WHITE, (ColoredTree(WHITE, None, 1), ColoredTree(WHITE, None, 2)))
    assert t.serialize(["k", "k"]) == "w(w[k] w[k])"


def test_eval_tree_on_v2():
    a, o = v2()
    hd, h = decomposed(a, o)
    k = a.e("k")
    assert eval_tree(a, h, ColoredTree(WHITE, None, 1), [k]) == k
    white = parse_tree("w(w[1] w[2])")
    black = parse_tree("b(w[1] w[2])")
    assert eval_tree(a, h, white, [k, k]) == a.e("z")
    assert eval_tree(a, h, black, [k, k]) == {a.index["w"]: -1}


def test_small_subalgebra_examples():
    a, o = v2()
    hd, h = decomposed(a, o)
    s = small_subalgebra(a, hd, h, check_trees=True)
    assert s.dims() == a.dims() + [0, 0]
    assert s.guaranteed and not s.cap_hit
    assert verify_closure(a, s.span, hd, h) == []

    c, oc = cp2_sum()
    hd, h = decomposed(c, oc)
    s = small_subalgebra(c, hd, h, check_trees=True)
    assert s.dims()[:5] == [1, 0, 7, 0, 1]

    e, oe = exterior()
    hd, h = decomposed(e, oe)
    s = small_subalgebra(e, hd, h, cap=35, check_trees=True)
    assert sum(s.dims()) == len(e) == 32


def test_verify_closure_reports_missing_w():
    a, o = v2()
    hd, h = decomposed(a, o)
    span = GradedSpan(a, 9)
    for name in ("1", "k", "z", "l", "v"):
        span.add(a.e(name))
    rep = verify_closure(a, span, hd, h)
    assert "h-closure fails in degree 4" in rep


def test_tree_dump_and_record():
    a, o = v2()
    hd, h = decomposed(a, o)
    dump, record = [], {}
    tree_span(a, hd, h, 9, record=record, dump=dump)
    trees = {d["tree"]: d for d in dump}
    assert "w(w[1] w[2])" in trees and "b(w[1] w[2])" in trees
    assert trees["b(w[1] w[2])"]["degrees"] == [3]
    assert all(record[l] >= l + 1 for l in record)


def test_subalgebra_as_cdga():
    a, o = v2()
    hd, h = decomposed(a, o)
    s = small_subalgebra(a, hd, h)
    S, inc, sor = as_cdga(a, s.span, o)
    assert check_cdga(S) == []
    assert classify(S, sor)["isDPD"]


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_tree_route_equals_closure_route(seed):
    a, o, hd, h = random_hodge(seed)
    cap = o.degree + 2
    cl, _ = closure_span(a, hd, h, cap)
    record = {}
    ts = tree_span(a, hd, h, cap, record=record)
    assert cl.same_as(ts) and ts.same_as(cl)
    if not hd.H.get(1):
        assert all(record[l] >= l + 1 for l in record)


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_small_subalgebra_properties(seed):
    a, o, hd, h = random_hodge(seed)
    s = small_subalgebra(a, hd, h)
    assert verify_closure(a, s.span, hd, h) == []
    assert s.span.dim(0) == 1 and s.span.dim(1) == 0
    S, inc, sor = as_cdga(a, s.span, o)
    q = nondeg_quotient(S, pairing_from_orientation(S, sor), sor)
    assert q.quasi_iso
    assert classify(q.algebra, q.orientation)["isDPD"]
