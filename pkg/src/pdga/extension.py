"""Extensions of Hodge type.

An oriented PDGA V is enlarged to V ⊗ Λ(w_i, z_i) with ``D w_i = z_i``,
one pair per basis vector of ``E^l``, and the orientation is extended so
that ``rho(xi_i) = z_i`` solves the conditions needed to twist the coexact
part into a Hodge one.  Levels run from the middle degree up to n - 1.
"""

from __future__ import annotations

from .algebra import (
    FreePresentation,
    GradedLinearMap,
    Orientation,
    build_truncated_free,
    homology,
    pairing_from_orientation,
    sign,
    tensor_product,
    vadd,
)
from .hodge import (
    HodgeData,
    HodgeError,
    PreconditionError,
    _cols,
    apply_twist,
    boundary_basis,
    check_hodge,
    coexact_perp,
    combine,
    h_orthogonalize,
    harmonic_projection,
    hodge_from_rho,
    middle_degrees,
    solve_twist,
    twist_to_hodge,
)
from .linalg import Matrix, _Echelon, extend_basis, inverse, kernel_basis, rank_of


class ExtensionError(ValueError):
    pass


class MiddleDegreeObstruction(ExtensionError):
    def __init__(self, message, twist):
        super().__init__(message)
        self.twist = twist


class ExtensionState:
    def __init__(self, algebra, orientation, H, C, E, rho, inclusion, retraction):
        self.algebra = algebra
        self.orientation = orientation
        self.H = H
        self.C = C
        self.E = E
        self.rho = rho
        self.inclusion = inclusion
        self.retraction = retraction
        self.generators = []
        self.log = []
        self.counter = {}

    @property
    def degree(self):
        return self.orientation.degree

    def pairing(self):
        return pairing_from_orientation(self.algebra, self.orientation)

    def hodge_data(self):
        return HodgeData(self.algebra, self.pairing(), self.H, self.C)


def choose_E(v, C, CP, preferred=None):
    """A complement of ``CP`` in ``span C``: preferred vectors first, then C."""
    F = v.field
    E = {}
    for d, Cd in C.items():
        dim = v.dim(d)
        ech = _Echelon(dim, F)
        for x in CP.get(d, []):
            if not ech.add(v.to_dense(x, d)):
                raise ExtensionError("C^⊥∩C basis is dependent in degree %d" % d)
        target = len(Cd)
        out = []
        for x in list((preferred or {}).get(d, [])) + list(Cd):
            if ech.rank == target:
                break
            if ech.add(v.to_dense(x, d)):
                out.append(x)
        if ech.rank != target:
            raise ExtensionError("could not complete E in degree %d" % d)
        if out:
            E[d] = out
    return E


def check_rho(v, p, C, E, rho, levels):
    """Verify ``<e1, rho e2> = <e1, e2>`` and ``<c, rho e2> = 0`` on the given levels."""
    n = p.degree
    hd = HodgeData(v, p, {}, C)
    CP = coexact_perp(hd)
    bad = []
    for i in levels:
        for b, e2 in enumerate(E.get(i, [])):
            r = rho.get(i, [])[b] if b < len(rho.get(i, [])) else None
            if r is None:
                bad.append("rho undefined on E%d[%d]" % (i, b))
                continue
            for a, e1 in enumerate(E.get(n - i, [])):
                if p(e1, r) != p(e1, e2):
                    bad.append("<e1, rho e2> != <e1, e2> at E%d[%d], E%d[%d]" % (n - i, a, i, b))
            for a, c in enumerate(CP.get(n - i, [])):
                if p(c, r):
                    bad.append("<c, rho e2> != 0 at perp%d[%d], E%d[%d]" % (n - i, a, i, b))
    return bad


def _decomposition_coords(v, H, E, CP, d):
    """Coordinates w.r.t. ``H ⊕ DE ⊕ D(CP) ⊕ E ⊕ CP`` in degree d."""
    F = v.field
    parts = [
        H.get(d, []),
        [v.d(x) for x in E.get(d - 1, [])],
        [v.d(x) for x in CP.get(d - 1, [])],
        E.get(d, []),
        CP.get(d, []),
    ]
    vecs = [x for part in parts for x in part]
    if len(vecs) != v.dim(d):
        raise ExtensionError("decomposition does not fit degree %d" % d)
    if not vecs:
        return parts, None
    inv = inverse(Matrix.from_columns(_cols(v, vecs, d), v.dim(d), F))
    return parts, inv


def _component(v, parts, inv, which, vec, d, onto=None):
    """Coefficients of ``vec`` on ``parts[which]`` combined with ``onto`` (default the part itself)."""
    if inv is None or not vec:
        return {}
    off = sum(len(p) for p in parts[:which])
    k = len(parts[which])
    dense = v.to_dense(vec, d)
    coeffs = []
    for r in range(off, off + k):
        row = inv.rows[r]
        s = v.field.zero
        for x, y in zip(row, dense):
            if x and y:
                s = s + x * y
        coeffs.append(s)
    return combine(v, coeffs, onto if onto is not None else parts[which])


def _embed(inc, data):
    return {d: [inc(x) for x in vecs] for d, vecs in data.items()}


def _complete_harmonic(v, H, C):
    """Add cycles to H where truncation creates classes that no level accounts for."""
    F = v.field
    trusted = v.trusted_degree()
    out = {d: list(x) for d, x in H.items()}
    for d in range(0, v.max_degree + 1):
        dim = v.dim(d)
        if not dim:
            continue
        ech = _Echelon(dim, F)
        for x in out.get(d, []) + [v.d(c) for c in C.get(d - 1, [])] + C.get(d, []):
            ech.add(v.to_dense(x, d))
        if ech.rank == dim:
            continue
        if d <= trusted:
            raise ExtensionError("homology of the extension grew in trusted degree %d" % d)
        for z in kernel_basis(v.diff_matrix(d)):
            if ech.add(list(z)):
                out.setdefault(d, []).append(v.to_sparse(z, d))
    return out


def extend_once(state, l, trunc):
    """One round of adjoining ``(w_i, z_i)`` for a basis of ``E^l``.

    Rounds repeat at the same level until the perpendicularity condition on
    degree ``n - l`` holds; each repeat must shrink ``(C^⊥∩C)^(n-l)``.
    """
    v = state.algebra
    n = state.degree
    half = (n + 1) // 2
    if l < half or (l == half and v.dim(1) != 0):
        raise PreconditionError("level %d out of range for degree %d (V^1 = %d)" % (l, n, v.dim(1)))
    if n % 2 == 0 and l == n // 2 + 1 and v.dim(1) != 0 and state.E.get(n // 2):
        raise PreconditionError("E^%d must vanish before level %d when V^1 != 0" % (n // 2, l))
    budget = None
    while True:
        v = state.algebra
        p = state.pairing()
        hd0 = HodgeData(v, p, state.H, state.C)
        CP = coexact_perp(hd0)
        xi = state.E.get(l, [])
        m = len(xi)
        if m == 0:
            state.rho[l] = []
            state.log.append({"level": l, "pairs": 0})
            return state
        old_perp = len(CP.get(n - l, []))
        if budget is None:
            budget = old_perp + 1
        budget -= 1
        if budget < 0:
            raise ExtensionError("perpendicularity iteration did not terminate at level %d" % l)
        start = state.counter.get(l, 0)
        state.counter[l] = start + m
        gens = [("w%d_%d" % (l, start + i + 1), l - 1) for i in range(m)] + [
            ("z%d_%d" % (l, start + i + 1), l) for i in range(m)
        ]
        diffs = {"w%d_%d" % (l, start + i + 1): [("z%d_%d" % (l, start + i + 1), "1")] for i in range(m)}
        lam = build_truncated_free(FreePresentation(gens, diffs, trunc, v.field))
        new, inc, _ = tensor_product(v, lam, trunc)
        F = v.field
        exps = lam.exponents
        wl = [sum(e) for e in exps]
        single = {}
        for j, e in enumerate(exps):
            if sum(e) == 1:
                single[j] = e.index(1)
        # orientation on the enlarged algebra
        partsA, invA = _decomposition_coords(v, state.H, state.E, CP, n - l)
        partsB, invB = _decomposition_coords(v, state.H, state.E, CP, n - l + 1)
        vals = {}
        for k, (i, j) in enumerate(new.pairs):
            if new.degrees[k] != n:
                continue
            if j == lam.unit:
                val = state.orientation({i: F.one})
            elif j in single and v.degrees[i] == n - l and single[j] >= m:
                t = single[j] - m
                e = _component(v, partsA, invA, 3, {i: F.one}, n - l)
                val = state.orientation(v.mul(e, xi[t]))
            elif j in single and v.degrees[i] == n - l + 1 and single[j] < m:
                t = single[j]
                e = _component(v, partsB, invB, 1, {i: F.one}, n - l + 1, onto=state.E.get(n - l, []))
                val = sign(n - l + 1) * state.orientation(v.mul(e, xi[t]))
            else:
                val = F.zero
            if val:
                vals[k] = val
        nor = Orientation(n, vals, new)
        bad = nor.annihilates_boundaries(new)
        if bad:
            raise ExtensionError("extended orientation does not vanish on boundaries: %s" % bad[:3])
        np_ = pairing_from_orientation(new, nor)
        H = _embed(inc, state.H)
        Cold = _embed(inc, state.C)
        Eold = _embed(inc, state.E)
        rho = _embed(inc, state.rho)
        pi = harmonic_projection(new, np_, H)
        # coexact parts of the word-length pieces
        w_index = set(range(m))
        Cnew = {d: list(x) for d, x in Cold.items()}
        C1 = {}
        for d in range(0, new.max_degree + 1):
            for k in sorted(set(wl) - {0}):
                idx = [q for q in new.basis(d) if wl[new.pairs[q][1]] == k]
                if not idx:
                    continue
                if k == 1:
                    idx.sort(key=lambda q: (0 if single.get(new.pairs[q][1], m) < m else 1, q))
                cols = []
                for q in idx:
                    img = new.diff[q]
                    cols.append(new.to_dense(img, d + 1) if new.dim(d + 1) else [])
                dimn = new.dim(d + 1)
                if dimn:
                    mat = Matrix.from_columns(cols, dimn, F)
                    ker = kernel_basis(mat)
                else:
                    ker = [[F.one if r == c else F.zero for r in range(len(idx))] for c in range(len(idx))]
                std = [[F.one if r == c else F.zero for r in range(len(idx))] for c in range(len(idx))]
                keep = extend_basis(ker, std, len(idx), F)
                vecs = [{idx[c]: F.one} for c in keep]
                vecs = [vadd(x, pi(x), -1) for x in vecs]
                Cnew.setdefault(d, []).extend(vecs)
                if k == 1:
                    C1.setdefault(d, []).extend(vecs)
        H = _complete_harmonic(new, H, Cnew)
        hd = HodgeData(new, np_, H, Cnew)
        CPn = coexact_perp(hd)
        pref = {d: Eold.get(d, []) + Cold.get(d, []) + C1.get(d, []) for d in set(Eold) | set(Cold) | set(C1)}
        Enew = choose_E(new, hd.C, CPn, pref)
        for d, vecs in Eold.items():
            got = Enew.get(d, [])
            if got[: len(vecs)] != vecs:
                raise ExtensionError("E is not contained in the new E in degree %d" % d)
        for i in range(half, l):
            if len(Enew.get(i, [])) != len(Eold.get(i, [])):
                raise ExtensionError("E changed in degree %d below level %d" % (i, l))
        new_perp = len(CPn.get(n - l, []))
        proj = [{i: F.one} if j == lam.unit else {} for (i, j) in new.pairs]
        retr = GradedLinearMap(new, v, proj)
        state.algebra = new
        state.orientation = nor
        state.H, state.C, state.E = H, hd.C, Enew
        state.inclusion = inc.compose(state.inclusion)
        state.retraction = state.retraction.compose(retr)
        state.generators.extend(gens)
        entry = {"level": l, "pairs": m, "perpBefore": old_perp, "perpAfter": new_perp, "dim": len(new)}
        state.log.append(entry)
        # at the entry level l = ceil(n/2) the w's themselves join C^⊥∩C in
        # degree l - 1, so the perpendicularity loop only runs above it
        if new_perp == old_perp or l == half:
            if len(Enew.get(l, [])) != m:
                raise ExtensionError("E^%d changed although the perpendicularity condition holds" % l)
            where = {pair: k for k, pair in enumerate(new.pairs)}
            rho[l] = [{where[(v.unit, lam.index[nm])]: F.one} for nm, _ in gens[m:]]
            state.rho = rho
            bad = check_rho(new, np_, hd.C, Enew, rho, range(half, l + 1))
            if bad:
                raise ExtensionError("rho conditions fail after level %d: %s" % (l, bad[:3]))
            return state
        if new_perp > old_perp:
            raise ExtensionError("C^⊥∩C grew in degree %d (%d -> %d)" % (n - l, old_perp, new_perp))
        state.rho = rho


class ExtensionResult:
    def __init__(self, algebra, orientation, hodge, inclusion, retraction, flags, log):
        self.algebra = algebra
        self.orientation = orientation
        self.hodge = hodge
        self.inclusion = inclusion
        self.retraction = retraction
        self.flags = flags
        self.log = log


def extend_to_hodge_type(a, orientation, trunc=None):
    """Oriented extension of Hodge type retracting onto ``a``."""
    n = orientation.degree
    F = a.field
    if a.dim(0) != 1:
        raise PreconditionError("algebra must be connected (V^0 = K)")
    if trunc is None:
        trunc = a.truncation if a.truncation is not None else max(n + 2, a.max_degree)
    p = pairing_from_orientation(a, orientation)
    hd = h_orthogonalize(a, p)
    ident = GradedLinearMap.identity(a)
    full = solve_twist(hd)
    if full.feasible:
        out = twist_to_hodge(hd, full)
        flags = {"route": "already-hodge", "generators": [], "V1": a.dim(1)}
        return ExtensionResult(a, orientation, out, ident, ident, flags, [])
    mid = solve_twist(hd, middle_degrees(n))
    half = (n + 1) // 2
    if mid.feasible:
        hd, _ = apply_twist(hd, mu2=mid.mu)
        start = half + 1
        route = "middle-twist"
    elif a.dim(1) == 0:
        start = half
        route = "middle-generators"
    else:
        raise MiddleDegreeObstruction(
            "no Hodge decomposition in the middle degree and V^1 != 0", mid
        )
    CP = coexact_perp(hd)
    E = choose_E(a, hd.C, CP)
    state = ExtensionState(a, orientation, hd.H, hd.C, E, {}, ident, ident)
    for l in range(start, n):
        extend_once(state, l, trunc)
    v = state.algebra
    p = state.pairing()
    hd = HodgeData(v, p, state.H, state.C)
    out = hodge_from_rho(hd, state.E, state.rho)
    flags = {
        "route": route,
        "generators": [[g, d] for g, d in state.generators],
        "V1": v.dim(1),
        "simplyConnected": v.dim(1) == 0,
    }
    return ExtensionResult(v, state.orientation, out, state.inclusion, state.retraction, flags, state.log)
