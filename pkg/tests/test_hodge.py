import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from pdga.algebra import CyclicPairing, Orientation, build_truncated_free, FreePresentation, homology, pairing_from_orientation
from pdga.corpus import (
    cp2_sum,
    exterior,
    from_tables,
    lambda_abc,
    middle_obstruction_n2,
    orient,
    random_cyclic_complex,
    random_pdga,
    v2,
)
from pdga.field import QQ
from pdga.hodge import (
    HodgeData,
    PreconditionError,
    apply_twist,
    check_hodge,
    check_homotopy,
    coexact_perp,
    degenerate_subspace,
    h_orthogonalize,
    hodge_decomposition,
    hodge_from_rho,
    is_acyclic,
    is_dg_ideal,
    middle_degree_obstruction,
    nondeg_quotient,
    solve_twist,
    standard_homotopy,
    twist_residuals,
    twist_to_hodge,
)
from pdga.linalg import Matrix


def fmt(a, vecs):
    return [a.format(x) for x in vecs]


def span_dim(a, vecs, d):
    if not vecs:
        return 0
    return sympy.Matrix([[sympy.Rational(str(c)) for c in a.to_dense(x, d)] for x in vecs]).rank()


def brute_perp_dims(a, p):
    """dim V^⊥ per degree from all basis pairs, via sympy."""
    out = {}
    n = p.degree
    for d in range(a.max_degree + 1):
        if not a.dim(d):
            continue
        rows = [[sympy.Rational(str(p.basis_value(i, j))) for j in a.basis(n - d)] for i in a.basis(d)]
        rank = sympy.Matrix(rows).rank() if rows and rows[0] else 0
        out[d] = a.dim(d) - rank
    return out


def v2_plus_ideal():
    """V2 plus a contractible square-zero ideal alpha -> beta that pairs with nothing."""
    names = ["1", "k", "w", "alpha", "z", "beta", "l", "v"]
    degs = [0, 2, 3, 3, 4, 4, 5, 7]
    a = from_tables(
        names,
        degs,
        diff={"w": {"z": 1}, "alpha": {"beta": 1}},
        products={("k", "k"): {"z": 1}, ("k", "w"): {"l": 1}, ("k", "l"): {"v": 1}, ("z", "w"): {"v": 1}},
    )
    return a, orient(a, {"v": 1})


def even_rho_example():
    """Degree 4 with one coexact e in the middle, <e, e> = 1 and rho(e) = Du."""
    a = from_tables(
        ["1", "u", "b", "e", "f", "v"],
        [0, 1, 2, 2, 3, 4],
        diff={"u": {"b": 1}, "e": {"f": 1}},
        products={("e", "e"): {"v": 1}, ("e", "b"): {"v": 1}, ("u", "f"): {"v": 1}},
    )
    return a, orient(a, {"v": 1})


def test_degenerate_subspace_examples():
    a, o = v2()
    assert all(not x for x in degenerate_subspace(a, pairing_from_orientation(a, o)).values())
    zero = CyclicPairing(7, {}, a)
    perp = degenerate_subspace(a, zero)
    assert {d: len(x) for d, x in perp.items()} == {d: a.dim(d) for d in range(8) if a.dim(d)}


def test_degenerate_subspace_lambda_brute_force():
    a, o = lambda_abc()
    p = pairing_from_orientation(a, o)
    perp = degenerate_subspace(a, p)
    assert {d: len(x) for d, x in perp.items()} == brute_perp_dims(a, p)
    assert fmt(a, perp[3]) == ["b"]
    assert is_dg_ideal(a, perp) == []
    assert is_acyclic(a, perp)


def test_quotient_identity_on_dpd():
    a, o = v2()
    q = nondeg_quotient(a, pairing_from_orientation(a, o), o)
    assert q.algebra.dims() == a.dims() and q.quasi_iso
    assert all(q.projection.images[i] == {i: 1} for i in range(len(a)))


def test_quotient_by_contractible_ideal():
    a, o = v2_plus_ideal()
    p = pairing_from_orientation(a, o)
    perp = degenerate_subspace(a, p)
    assert sorted(a.format(x) for d in perp for x in perp[d]) == ["alpha", "beta"]
    q = nondeg_quotient(a, p, o)
    assert q.quasi_iso
    assert q.algebra.names == ["1", "k", "w", "z", "l", "v"]


def test_quotient_losing_a_class():
    a = from_tables(["1", "x", "v"], [0, 2, 4])
    o = orient(a, {"v": 1})
    q = nondeg_quotient(a, pairing_from_orientation(a, o), o)
    assert q.quasi_iso is False
    assert q.algebra.dims() == [1, 0, 0, 0, 1]


def test_h_orthogonalize_v2():
    a, o = v2()
    hd = h_orthogonalize(a, pairing_from_orientation(a, o))
    assert sorted(a.format(x) for d in hd.H for x in hd.H[d]) == ["1", "k", "l", "v"]
    assert [a.format(x) for d in hd.C for x in hd.C[d]] == ["w"]
    assert check_hodge(hd)["hOrthogonal"]


def test_h_orthogonalize_trivial_cases():
    a, o = cp2_sum()
    hd = h_orthogonalize(a, pairing_from_orientation(a, o))
    assert not any(hd.C.values())
    assert sum(len(x) for x in hd.H.values()) == len(a)
    b, ob = v2()
    pb = pairing_from_orientation(b, ob)
    C0 = {3: [b.e("w")]}
    assert h_orthogonalize(b, pb, C0=C0).C[3] == [b.e("w")]


def test_h_orthogonalize_rejects_degenerate_homology():
    a = from_tables(["1", "x", "v"], [0, 2, 4])
    o = orient(a, {"v": 1})
    with pytest.raises(PreconditionError):
        h_orthogonalize(a, pairing_from_orientation(a, o))


def test_solve_twist_vacuous_on_v2():
    a, o = v2()
    hd = h_orthogonalize(a, pairing_from_orientation(a, o))
    tw = solve_twist(hd)
    assert tw.feasible and tw.equations == 0
    assert all(m == {} for ms in tw.mu.values() for m in ms)


def test_solve_twist_obstruction_certificate():
    a, o = middle_obstruction_n2()
    hd = h_orthogonalize(a, pairing_from_orientation(a, o))
    tw = solve_twist(hd)
    assert not tw.feasible and tw.unknowns == 0
    cert = tw.certificate
    assert cert["combinedRhs"] != "0"
    assert tw.degree_pairs == [(1, 1)]
    mid = middle_degree_obstruction(hd)
    assert not mid.feasible


def test_middle_degree_feasible_on_dpd():
    for a, o in (v2(), exterior(), cp2_sum()):
        hd = h_orthogonalize(a, pairing_from_orientation(a, o))
        assert middle_degree_obstruction(hd).feasible
        assert solve_twist(hd).feasible


def test_apply_twist_identity_and_solution():
    a, o, _ = random_pdga(random.Random(5), recipe="tensor")
    hd = h_orthogonalize(a, pairing_from_orientation(a, o))
    same, flags = apply_twist(hd)
    assert same.H == hd.H and same.C == hd.C
    assert flags == check_hodge(hd)
    tw = solve_twist(hd)
    if tw.feasible:
        _, flags = apply_twist(hd, mu2=tw.mu)
        assert flags["hodge"]


def test_apply_twist_general_form():
    """Random eta: H -> im D with mu1 solved from the harmonic Gram matrices keeps H ⊥ C."""
    rng = random.Random(8)
    a, o, _ = random_pdga(rng, core="S2xS3", recipe="tensor", deg_w=2)
    p = pairing_from_orientation(a, o)
    hd = h_orthogonalize(a, p)
    n = p.degree
    eta, mu1 = {}, {}
    for d, Hd in hd.H.items():
        bnd = [a.d(c) for c in hd.C.get(d - 1, [])]
        eta[d] = []
        for _ in Hd:
            x = {}
            for b in bnd:
                c = rng.randint(-2, 2)
                for k, y in b.items():
                    x[k] = x.get(k, 0) + c * y
            eta[d].append({k: QQ(y) for k, y in x.items() if y})
    for d, Cd in hd.C.items():
        Hd, Hc = hd.H.get(d, []), hd.H.get(n - d, [])
        if not Hd:
            continue
        G = sympy.Matrix([[sympy.Rational(str(p(h2, h1))) for h1 in Hd] for h2 in Hc])
        mu1[d] = []
        for c in Cd:
            rhs = sympy.Matrix([-sympy.Rational(str(p(eta[n - d][j], c))) for j in range(len(Hc))])
            coeffs = G.solve(rhs)
            out = {}
            for q, h in zip(coeffs, Hd):
                for k, y in h.items():
                    out[k] = out.get(k, 0) + QQ(str(q)) * y
            mu1[d].append({k: y for k, y in out.items() if y})
    _, flags = apply_twist(hd, eta=eta, mu1=mu1)
    assert flags["hOrthogonal"], flags["failures"]


def test_hodge_from_rho_v2_unchanged():
    a, o = v2()
    hd = h_orthogonalize(a, pairing_from_orientation(a, o))
    # w pairs with nothing coexact (C^4 = 0), so it lies in C^⊥∩C and E is empty
    assert fmt(a, coexact_perp(hd)[3]) == ["w"]
    out = hodge_from_rho(hd, {}, {})
    assert out.C == hd.C


def test_hodge_from_rho_even_middle():
    a, o = even_rho_example()
    p = pairing_from_orientation(a, o)
    assert p(a.e("e"), a.e("e")) == 1 and p(a.e("e"), a.e("b")) == 1
    hd = h_orthogonalize(a, p)
    assert fmt(a, hd.C[2]) == ["e"]
    assert fmt(a, coexact_perp(hd)[1]) == ["u"]
    out = hodge_from_rho(hd, {2: [a.e("e")]}, {2: [a.e("b")]})
    c = out.C[2][0]
    assert c == {a.index["e"]: 1, a.index["b"]: QQ("-1/2")}
    assert p(c, c) == 0
    with pytest.raises(PreconditionError):
        hodge_from_rho(hd, {2: [a.e("e")]}, {2: [{}]})


def test_standard_homotopy_examples():
    a, o = v2()
    hd = twist_to_hodge(h_orthogonalize(a, pairing_from_orientation(a, o)))
    hom = standard_homotopy(hd)
    assert hom.h.images[a.index["z"]] == {a.index["w"]: -1}
    assert all(not hom.h.images[i] for i in range(len(a)) if a.names[i] != "z")
    assert all(check_homotopy(hd, hom)[k] for k in ("commRel", "hSquaredZero", "vanishesOnHC"))

    c, oc = cp2_sum()
    hdc = twist_to_hodge(h_orthogonalize(c, pairing_from_orientation(c, oc)))
    assert not any(standard_homotopy(hdc).h.images)

    lam = build_truncated_free(FreePresentation([("w", 3), ("z", 4)], {"w": [("z", "1")]}, 7))
    hd = HodgeData(lam, pairing_from_orientation(lam, orient(lam, {"w*z": 1})), {0: [lam.one()], 7: [lam.e("w*z")]}, {3: [lam.e("w")]})
    hom = standard_homotopy(hd)
    assert hom.h.images[lam.index["z"]] == {lam.index["w"]: -1}
    w = lam.e("w")
    assert hom.h(lam.d(w)) == {lam.index["w"]: -1}
    assert check_homotopy(hd, hom)["commRel"]


def test_hodge_data_certificates_on_lambda():
    a, o = lambda_abc()
    hd, tw, _ = hodge_decomposition(a, pairing_from_orientation(a, o))
    assert tw.feasible
    flags = check_hodge(hd)
    assert flags["hodge"] and not flags["failures"]


@given(st.integers(0, 10**6))
def test_twist_solution_checked_literally(seed):
    a, o, _ = random_pdga(random.Random(seed))
    hd = h_orthogonalize(a, pairing_from_orientation(a, o))
    tw = solve_twist(hd)
    if tw.feasible:
        assert twist_residuals(hd, tw.mu) == []
        new, flags = apply_twist(hd, mu2=tw.mu)
        assert flags["hodge"]
        ho = standard_homotopy(new)
        assert all(check_homotopy(new, ho)[k] for k in ("commRel", "hSquaredZero", "vanishesOnHC"))
    else:
        assert tw.certificate["combinedRhs"] != "0"


@given(st.integers(0, 10**6))
def test_certified_decompositions_are_complete(seed):
    a, o, _ = random_pdga(random.Random(seed))
    p = pairing_from_orientation(a, o)
    hd, tw, _ = hodge_decomposition(a, p)
    if hd is None:
        return
    for d in range(a.max_degree + 1):
        H, B, C = hd.H.get(d, []), hd.B(d), hd.C.get(d, [])
        assert len(H) + len(B) + len(C) == a.dim(d)
        assert span_dim(a, H + B + C, d) == a.dim(d)
    n = p.degree
    for d in range(n + 1):
        for z in homology(a).reps.get(d, []) + hd.B(d):
            for b in hd.B(n - d):
                assert p(z, b) == 0


@given(st.integers(0, 10**6))
def test_hodge_type_iff_perp_acyclic(seed):
    v, p = random_cyclic_complex(random.Random(seed))
    try:
        ho = h_orthogonalize(v, p)
    except PreconditionError:
        return
    perp = degenerate_subspace(v, p)
    assert is_acyclic(v, perp) == solve_twist(ho).feasible


@given(st.integers(0, 10**6))
def test_quotient_is_nondegenerate(seed):
    a, o, _ = random_pdga(random.Random(seed))
    q = nondeg_quotient(a, pairing_from_orientation(a, o), o)
    m = q.algebra
    n = o.degree
    for d in range(n + 1):
        g = q.pairing.blocks.get(d)
        if m.dim(d):
            assert g is not None and g.rank() == m.dim(d) == m.dim(n - d)
