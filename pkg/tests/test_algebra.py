import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from pdga.algebra import (
    AlgebraError,
    CyclicPairing,
    FreePresentation,
    Orientation,
    build_truncated_free,
    check_cdga,
    check_cyclic,
    check_morphism,
    classify,
    homology,
    induced_orientation,
    induced_pairing,
    morphism_from_generators,
    orientation_from_pairing,
    pairing_from_orientation,
    tensor_product,
)
from pdga.corpus import cp2_sum, f1, f2, from_tables, lambda_abc, random_pdga, v1, v2
from pdga.field import QQ
from pdga.linalg import Matrix


def sympy_homology_dims(a, top):
    """Rank-nullity from the raw differential tables, via sympy."""
    dims = []
    for d in range(top + 1):
        src = a.basis(d)
        if not src:
            dims.append(0)
            continue

        def rank(s, t):
            if not s or not t:
                return 0
            m = sympy.Matrix([[sympy.Rational(str(a.diff[i].get(j, 0))) for i in s] for j in t])
            return m.rank()

        z = len(src) - rank(src, a.basis(d + 1))
        b = rank(a.basis(d - 1), src)
        dims.append(z - b)
    return dims


def test_v2_axioms_and_pairing():
    a, o = v2()
    assert check_cdga(a) == []
    p = pairing_from_orientation(a, o)
    assert check_cyclic(a, p) == []
    nonzero = {(a.names[i], a.names[j]): p.basis_value(i, j) for i in range(len(a)) for j in range(len(a)) if p.basis_value(i, j)}
    assert nonzero == {("1", "v"): 1, ("v", "1"): 1, ("k", "l"): 1, ("l", "k"): 1, ("w", "z"): 1, ("z", "w"): 1}


def test_broken_differentials_are_reported():
    names, degs = ["1", "k", "w", "z", "l", "v"], [0, 2, 3, 4, 5, 7]
    prods = {("k", "k"): {"z": 1}, ("k", "w"): {"l": 1}, ("k", "l"): {"v": 1}, ("z", "w"): {"v": 1}}
    rep = check_cdga(from_tables(names, degs, diff={"w": {"k": 1}}, products=prods))
    assert any("D-degree" in r for r in rep)
    rep = check_cdga(from_tables(names, degs, diff={"w": {"z": 1}, "k": {"w": 1}}, products=prods))
    assert any("D∘D" in r or "Leibniz" in r for r in rep)


def test_lambda_abc_structure():
    a, o = lambda_abc()
    assert check_cdga(a) == []
    assert a.dims() == [1, 0, 1, 1, 1, 2, 1, 2, 2, 2]
    assert a.d(a.e("b")) == a.e("a^2")
    cls = classify(a, o)
    assert cls["isPDGA"] and not cls["isDPD"]
    p = pairing_from_orientation(a, o)
    # b pairs with nothing in degree 4
    assert p.blocks[3].rank() == 0


def test_homology_dims():
    for a, _ in (v2(), lambda_abc(), v1()):
        assert homology(a).dims(7) == [1, 0, 1, 0, 0, 1, 0, 1]
    a, _ = cp2_sum()
    assert homology(a).dims() == [1, 0, 7, 0, 1]
    a, _ = v2()
    h = homology(a)
    assert [a.format(r) for d in h.degrees() for r in h.reps[d]] == ["1", "k", "l", "v"]


def test_homology_matches_rank_nullity():
    rng = random.Random(11)
    cases = [v2()[0], lambda_abc()[0], cp2_sum()[0]] + [random_pdga(rng)[0] for _ in range(6)]
    for a in cases:
        top = int(min(a.max_degree, a.trusted_degree()))
        assert homology(a).dims(top) == sympy_homology_dims(a, top)


def test_truncation_soundness():
    for T in (7, 8, 9):
        lo, _ = lambda_abc(T)
        hi, _ = lambda_abc(T + 2)
        assert homology(lo).dims(T - 1) == homology(hi).dims(T - 1)


def test_acyclic_free_algebra():
    a = build_truncated_free(FreePresentation([("w", 3), ("z", 4)], {"w": [("z", "1")]}, 7))
    assert [a.names[i] for i in range(len(a))] == ["1", "w", "z", "w*z"]
    assert a.d(a.e("w*z")) == {}
    # w*z survives only because D(z*z) was cut off; degree T is not trusted
    assert a.trusted_degree() == 6
    assert homology(a).dims(6) == [1, 0, 0, 0, 0, 0, 0]
    b = build_truncated_free(FreePresentation([("w", 3), ("z", 4)], {"w": [("z", "1")]}, 8))
    assert homology(b).dims(7) == [1, 0, 0, 0, 0, 0, 0, 0]


def test_polynomial_truncation():
    a = build_truncated_free(FreePresentation([("a", 2)], {}, 7))
    assert a.names == ["1", "a", "a^2", "a^3"]
    assert a.degrees == [0, 2, 4, 6]


def test_tensor_koszul_sign():
    a, _ = v2()
    lam = build_truncated_free(FreePresentation([("w", 6), ("z", 7)], {"w": [("z", "1")]}, 9))
    t, ia, ib = tensor_product(a, lam, 9)
    kw = t.mul(ia(a.e("k")), ib(lam.e("w")))
    kz = t.mul(ia(a.e("k")), ib(lam.e("z")))
    assert t.d(kw) == kz
    # w of V2 is odd: D(w⊗w') = z⊗w' - w⊗z'
    ww = t.mul(ia(a.e("w")), ib(lam.e("w")))
    expect = {}
    for k, c in t.mul(ia(a.e("z")), ib(lam.e("w"))).items():
        expect[k] = c
    for k, c in t.mul(ia(a.e("w")), ib(lam.e("z"))).items():
        expect[k] = expect.get(k, 0) - c
    assert t.d(ww) == {k: c for k, c in expect.items() if c}
    assert check_cdga(t) == []


def test_tensor_with_unit_algebra():
    a, _ = v2()
    one = from_tables(["1"], [0])
    t, _, _ = tensor_product(a, one)
    assert t.dims() == a.dims()
    assert check_cdga(t) == []


def test_orientation_round_trip_and_scaling():
    a, o = v2()
    p = pairing_from_orientation(a, o)
    back = orientation_from_pairing(p, a)
    assert back.values == o.values
    assert orientation_from_pairing(p.scaled(QQ(3)), a).values == {a.index["v"]: 3}
    with pytest.raises(AlgebraError):
        orientation_from_pairing(p.scaled(QQ(0)), a)
    with pytest.raises(AlgebraError):
        Orientation(7, {}, a)


def test_symmetry_violation_reported():
    a, o = v2()
    p = pairing_from_orientation(a, o)
    blocks = {d: Matrix([list(r) for r in m.rows], m.ncols) for d, m in p.blocks.items()}
    # <l, k> = -1 while <k, l> = 1; both degrees give sign (-1)^10 = +1
    blocks[5].rows[0][0] = QQ(-1)
    bad = CyclicPairing(7, blocks, a)
    assert any("symmetry" in r.lower() for r in check_cyclic(a, bad))


def test_induced_structures():
    a, o = v2()
    h = homology(a)
    assert induced_orientation(o, h) == [1]
    hp = induced_pairing(pairing_from_orientation(a, o), h)
    assert hp[2].rows == [[1]] and hp[0].rows == [[1]]
    c, oc = cp2_sum(signs=[1, -1, 1, 1, -1, 1, 1])
    g = pairing_from_orientation(c, oc).blocks[2]
    assert all(g.rows[i][j] == (0 if i != j else [1, -1, 1, 1, -1, 1, 1][i]) for i in range(7) for j in range(7))


def test_classify_corpus():
    for a, o in (v1(), v2()):
        cls = classify(a, o)
        assert cls["isDPD"] and cls["isPDGA"] and cls["simplyConnected"] and cls["degree"] == 7


def test_lambda_maps_to_v1_and_v2_are_quasi_isomorphisms():
    lam, _ = lambda_abc(9)
    for tgt, build in ((v1(), f1), (v2(), f2)):
        b, ob = tgt
        f = build(lam, b)
        rep = check_morphism(f, lam, lambda_abc(9)[1], b, ob)
        assert rep["chainMap"] and rep["multiplicative"] and rep["unital"]
        assert rep["quasiIso"] and rep["orientationCompatible"]


def test_perturbed_map_flips_orientation():
    lam, olam = lambda_abc(9)
    b, ob = v1()
    f = morphism_from_generators(lam, b, {"a": b.e("a"), "c": {b.index["c"]: QQ(2)}})
    rep = check_morphism(f, lam, olam, b, ob)
    assert rep["quasiIso"] and rep["orientationCompatible"] is False


@given(st.integers(0, 10**6))
def test_random_pdgas_are_oriented_cdgas(seed):
    a, o, info = random_pdga(random.Random(seed))
    assert check_cdga(a, associativity=len(a) < 40) == []
    assert o.annihilates_boundaries(a) == []
    p = pairing_from_orientation(a, o)
    assert orientation_from_pairing(p, a).values == o.values
    assert classify(a, o)["isPDGA"]
