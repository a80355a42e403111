import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdga.algebra import GradedLinearMap, check_cdga, check_morphism, homology, pairing_from_orientation, sign
from pdga.corpus import add_cross_pairs, middle_obstruction_n2, random_non_hodge, sphere, v2
from pdga.extension import (
    ExtensionState,
    MiddleDegreeObstruction,
    check_rho,
    choose_E,
    extend_once,
    extend_to_hodge_type,
)
from pdga.hodge import PreconditionError, check_hodge, coexact_perp, h_orthogonalize

GEN = re.compile(r"^([wz]\d+_\d+)(?:\^(\d+))?$")


def word_length(name):
    total = 0
    for part in name.split("*"):
        m = GEN.match(part)
        if m:
            total += int(m.group(2) or 1)
    return total


def synthetic():
    """V2 with a square-zero acyclic piece whose coexact vectors pair across degrees 3 and 4."""
    a, o = v2()
    return add_cross_pairs(a, o, [3, 4], random.Random(1))[:2]


def initial_state(a, o):
    hd = h_orthogonalize(a, pairing_from_orientation(a, o))
    E = choose_E(a, hd.C, coexact_perp(hd))
    ident = GradedLinearMap.identity(a)
    return ExtensionState(a, o, hd.H, hd.C, E, {}, ident, ident)


def morphism_ok(r):
    return r["chainMap"] and r["multiplicative"] and r["unital"] and r["quasiIso"] and r["orientationCompatible"] is True


def check_result(a, o, res):
    V, vor = res.algebra, res.orientation
    assert check_cdga(V, associativity=len(V) < 80) == []
    assert vor.annihilates_boundaries(V) == []
    flags = check_hodge(res.hodge)
    assert flags["hodge"], flags["failures"]
    inc = check_morphism(res.inclusion, a, o, V, vor)
    ret = check_morphism(res.retraction, V, vor, a, o)
    assert morphism_ok(inc) and morphism_ok(ret)
    comp = res.retraction.compose(res.inclusion)
    assert comp.images == GradedLinearMap.identity(a).images
    # the extended orientation restricts to the old one
    for i in a.basis(o.degree):
        assert vor(res.inclusion.images[i]) == o({i: a.field.one})
    n = o.degree
    assert homology(V).dims(n + 1) == homology(a).dims(n + 1)


def test_v2_is_already_hodge():
    a, o = v2()
    res = extend_to_hodge_type(a, o)
    assert res.flags["route"] == "already-hodge"
    assert res.algebra is a and res.flags["generators"] == []
    assert check_hodge(res.hodge)["hodge"]


def test_low_degree_inputs_unchanged():
    for deg in (2, 3):
        a, o = sphere(deg, "x")
        res = extend_to_hodge_type(a, o)
        assert res.algebra is a and res.flags["route"] == "already-hodge"


def test_extend_once_with_empty_level():
    a, o = v2()
    state = initial_state(a, o)
    for l in (4, 5, 6):
        extend_once(state, l, 9)
    assert state.algebra is a
    assert [e["pairs"] for e in state.log] == [0, 0, 0]


def test_extend_once_rejects_low_levels():
    a, o = v2()
    with pytest.raises(PreconditionError):
        extend_once(initial_state(a, o), 3, 9)


def test_synthetic_single_pair_and_orientation_table():
    a, o = synthetic()
    state = initial_state(a, o)
    assert {d: [a.format(x) for x in v] for d, v in state.E.items()} == {3: ["u1"], 4: ["u2"]}
    E3 = list(state.E[3])
    xi = state.E[4][0]
    extend_once(state, 4, 9)
    V, vor = state.algebra, state.orientation
    assert state.generators == [("w4_1", 3), ("z4_1", 4)]
    assert [e["pairs"] for e in state.log] == [1]
    z, w = V.e("z4_1"), V.e("w4_1")
    inc = state.inclusion
    for e in E3:
        ie = inc(e)
        assert vor(V.mul(ie, z)) == o(a.mul(e, xi))
        assert vor(V.mul(inc(a.d(e)), w)) == sign(3 + 1) * o(a.mul(e, xi))
    # orientation agrees on V, vanishes on boundaries and on word length >= 2
    for i in a.basis(7):
        assert vor(inc.images[i]) == o({i: 1})
    assert vor.annihilates_boundaries(V) == []
    for k in V.basis(7):
        if word_length(V.names[k]) >= 2:
            assert vor({k: 1}) == 0
    assert check_rho(V, pairing_from_orientation(V, vor), state.C, state.E, state.rho, [4]) == []
    assert morphism_ok(check_morphism(inc, a, o, V, vor))


def test_synthetic_end_to_end():
    a, o = synthetic()
    res = extend_to_hodge_type(a, o)
    assert res.flags["route"] == "middle-generators"
    assert res.flags["generators"] == [["w4_1", 3], ["z4_1", 4]]
    assert len(res.algebra) > len(a)
    check_result(a, o, res)


def test_word_length_filtration():
    a, o = synthetic()
    V = extend_to_hodge_type(a, o).algebra
    wl = [word_length(x) for x in V.names]
    for (i, j), img in V.mult.items():
        for k in img:
            assert wl[k] >= wl[i] + wl[j]
    for i, img in enumerate(V.diff):
        for k in img:
            assert wl[k] == wl[i]


def test_middle_obstruction_with_degree_one():
    a, o = middle_obstruction_n2()
    with pytest.raises(MiddleDegreeObstruction) as err:
        extend_to_hodge_type(a, o)
    assert err.value.twist.certificate is not None


@settings(max_examples=6)
@given(st.integers(0, 10**6))
def test_random_non_hodge_extensions(seed):
    a, o, _ = random_non_hodge(random.Random(seed))
    res = extend_to_hodge_type(a, o)
    assert res.flags["route"] in ("middle-twist", "middle-generators")
    check_result(a, o, res)
