"""Poincaré duality models with a self-verifying zig-zag.

Two routes produce a dPD algebra M quasi-isomorphic to the input V:

* small:  V <- S -> Q(S), where S is the small subalgebra of a Hodge
  decomposition of V and Q is the non-degenerate quotient;
* extend: V -> V̂ -> Q(V̂), where V̂ is an oriented extension of Hodge type.
"""

from __future__ import annotations

from .algebra import (
    GradedLinearMap,
    check_cdga,
    check_cyclic,
    check_morphism,
    classify,
    homology,
    pairing_from_orientation,
)
from .extension import MiddleDegreeObstruction, extend_to_hodge_type
from .hodge import (
    PreconditionError,
    check_homotopy,
    hodge_decomposition,
    middle_degrees,
    nondeg_quotient,
    solve_twist,
    standard_homotopy,
)
from .linalg import Matrix
from .trees import as_cdga, small_subalgebra, verify_closure


class Leg:
    """One map of the zig-zag together with the oriented algebras it joins."""

    def __init__(self, label, f, source, source_or, target, target_or):
        self.label = label
        self.map = f
        self.source, self.source_or = source, source_or
        self.target, self.target_or = target, target_or

    def check(self):
        return check_morphism(self.map, self.source, self.source_or, self.target, self.target_or)


class ModelResult:
    def __init__(self, route, model, orientation, legs, report, intermediate=None):
        self.route = route
        self.model = model
        self.orientation = orientation
        self.legs = legs
        self.report = report
        self.intermediate = intermediate or {}

    @property
    def ok(self):
        return self.report["verified"]


def _leg_ok(r):
    return all(r[k] for k in ("chainMap", "multiplicative", "unital", "quasiIso")) and r["orientationCompatible"] is True


def dpd_rigidity(f, a, or_a, b, or_b):
    """Pairing preservation on all basis pairs and injectivity of ``f``."""
    pa = pairing_from_orientation(a, or_a)
    pb = pairing_from_orientation(b, or_b)
    n = or_a.degree
    bad = []
    for i in range(len(a)):
        for j in a.basis(n - a.degrees[i]):
            if pb(f.images[i], f.images[j]) != pa.basis_value(i, j):
                bad.append((a.names[i], a.names[j]))
    rank_ok = True
    for d in range(0, a.max_degree + 1):
        if a.dim(d) and f.matrix(d).rank() != a.dim(d):
            rank_ok = False
    return {"pairingPreserved": not bad, "fullColumnRank": rank_ok, "failures": bad[:10]}


def build_pd_model(a, orientation, route="auto", cap=None):
    """PD model of an oriented PDGA with connected, simply-connected homology."""
    if route not in ("auto", "small", "extend"):
        raise ValueError("route must be auto, small or extend")
    h = homology(a)
    if h.dim(0) != 1 or h.dim(1) != 0:
        raise PreconditionError("homology must be connected and simply-connected (H^0 = K, H^1 = 0)")
    n = orientation.degree
    p = pairing_from_orientation(a, orientation)
    hd, tw, ho = hodge_decomposition(a, p)
    chosen = route
    if route == "auto":
        chosen = "small" if tw.feasible else "extend"
    inter = {}
    if chosen == "small":
        if not tw.feasible:
            mid = solve_twist(ho, middle_degrees(n))
            raise MiddleDegreeObstruction("input admits no Hodge decomposition; use the extend route", mid if not mid.feasible else tw)
        hom = standard_homotopy(hd)
        hflags = check_homotopy(hd, hom)
        small = small_subalgebra(a, hd, hom.h, a.max_degree if cap is None else cap)
        closure = verify_closure(a, small.span, hd, hom.h)
        S, inc, sor = as_cdga(a, small.span, orientation)
        q = nondeg_quotient(S, pairing_from_orientation(S, sor), sor)
        legs = [
            Leg("inclusion", inc, S, sor, a, orientation),
            Leg("projection", q.projection, S, sor, q.algebra, q.orientation),
        ]
        inter = {"S": (S, sor), "homotopy": hflags, "closure": closure, "capHit": sorted(small.cap_hit)}
    else:
        ext = extend_to_hodge_type(a, orientation)
        V, vor = ext.algebra, ext.orientation
        q = nondeg_quotient(V, pairing_from_orientation(V, vor), vor)
        legs = [
            Leg("inclusion", ext.inclusion, a, orientation, V, vor),
            Leg("projection", q.projection, V, vor, q.algebra, q.orientation),
        ]
        inter = {"Vhat": (V, vor), "extension": ext.flags, "retraction": ext.retraction}
    M, mor = q.algebra, q.orientation
    reports = [dict(label=leg.label, **leg.check()) for leg in legs]
    cls = classify(M, mor)
    axioms = check_cdga(M)
    cyc = check_cyclic(M, pairing_from_orientation(M, mor))
    finite = M.max_degree <= n
    verified = (
        all(_leg_ok(r) for r in reports)
        and cls["isDPD"]
        and not axioms
        and not cyc
        and finite
        and q.quasi_iso
        and inter.get("homotopy", {"commRel": True})["commRel"]
        and not inter.get("closure")
    )
    report = {
        "route": chosen,
        "legs": reports,
        "classify": cls,
        "modelAxioms": axioms,
        "modelCyclic": cyc,
        "finite": finite,
        "quotientQuasiIso": q.quasi_iso,
        "verified": verified,
        "dims": {"input": a.dims(), "model": M.dims()},
    }
    if chosen == "small":
        report["homotopy"] = inter["homotopy"]
        report["closureFailures"] = inter["closure"]
        report["capHit"] = inter["capHit"]
    else:
        report["extension"] = inter["extension"]
    return ModelResult(chosen, M, mor, legs, report, inter)


# -- common embeddings --------------------------------------------------------

def _closed(a, d):
    from .linalg import kernel_basis

    if not a.dim(d):
        return []
    return [a.to_sparse(z, d) for z in kernel_basis(a.diff_matrix(d))]


def _square_type(a, d):
    """``zero`` if every closed degree-d vector squares to zero, ``anisotropic``
    if no nonzero one does (decided exactly only in dimension one), else ``mixed``."""
    Z = _closed(a, d)
    if not Z:
        return "empty", 0
    prods = [[a.mul(x, y) for y in Z] for x in Z]
    if all(not p for row in prods for p in row):
        return "zero", len(Z)
    if len(Z) == 1:
        return "anisotropic", 1
    return "mixed", len(Z)


def _same_structure(a, b):
    return (
        a.names == b.names
        and a.degrees == b.degrees
        and a.diff == b.diff
        and a.mult == b.mult
        and a.field == b.field
    )


def verify_no_common_embedding(m1, m2, probe, degree=2):
    """Constraints on PDGA quasi-isomorphisms ``m1 -> probe <- m2`` between dPD algebras.

    Such maps are injective and multiplicative, so closed degree-2 vectors
    with vanishing squares cannot be identified with ones whose square is
    nonzero.  When ``probe`` has nothing in degree 1, closed vectors in
    degree 2 are exactly its homology, which bounds how many independent
    images fit.
    """
    (a1, o1), (a2, o2), (p3, o3) = m1, m2, probe
    cons = []

    def add(name, ok, detail):
        cons.append({"constraint": name, "holds": bool(ok), "detail": detail})

    for label, (x, ox) in (("m1", m1), ("m2", m2), ("probe", probe)):
        add("%s is dPD" % label, classify(x, ox)["isDPD"], "non-degenerate chain-level pairing")
    for label, x in (("m1", a1), ("m2", a2)):
        for d in range(0, x.max_degree + 1):
            if x.dim(d) > p3.dim(d):
                add("injective %s -> probe" % label, False, "dim %s^%d = %d > dim probe^%d = %d" % (label, d, x.dim(d), d, p3.dim(d)))
                break
        else:
            add("injective %s -> probe" % label, True, "dimensions fit in every degree")
    h1, h2, h3 = homology(a1), homology(a2), homology(p3)
    add(
        "equal H^%d" % degree,
        h1.dim(degree) == h2.dim(degree) == h3.dim(degree),
        "dims %d, %d, %d" % (h1.dim(degree), h2.dim(degree), h3.dim(degree)),
    )
    t1, z1 = _square_type(a1, degree)
    t2, z2 = _square_type(a2, degree)
    if {t1, t2} == {"zero", "anisotropic"}:
        need = z1 + z2
        why = "images of square-zero and anisotropic closed vectors meet only in 0"
    else:
        need = max(z1, z2)
        why = "images are injective"
    add("squares of closed degree-%d vectors" % degree, True, "m1: %s (%d), m2: %s (%d)" % (t1, z1, t2, z2))
    if p3.dim(degree - 1) == 0:
        avail = h3.dim(degree)
        add(
            "closed degree-%d vectors fit in probe" % degree,
            need <= avail,
            "need %d independent closed vectors, probe^%d = 0 leaves dim Z^%d = dim H^%d = %d (%s)"
            % (need, degree - 1, degree, degree, avail, why),
        )
    else:
        avail = len(_closed(p3, degree))
        add(
            "closed degree-%d vectors fit in probe" % degree,
            need <= avail,
            "need %d, probe has dim Z^%d = %d (%s)" % (need, degree, avail, why),
        )
    violated = [c for c in cons if not c["holds"]]
    witness = None
    if not violated and _same_structure(a1, p3) and _same_structure(a2, p3):
        ident = GradedLinearMap.identity(p3)
        r1 = check_morphism(ident, a1, o1, p3, o3)
        r2 = check_morphism(ident, a2, o2, p3, o3)
        if _leg_ok(r1) and _leg_ok(r2):
            witness = "identity maps"
    if violated:
        status = "unsatisfiable"
    elif witness:
        status = "satisfiable"
    else:
        status = "inconclusive"
    return {"status": status, "constraints": cons, "witness": witness}
