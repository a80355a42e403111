"""Hodge decompositions of cyclic cochain complexes.

A decomposition is stored by its harmonic part ``H`` and coexact part
``C`` (dicts from degree to lists of sparse vectors); the exact part is
always ``D(C)``.
"""

from __future__ import annotations

from .algebra import CDGA, Complex, GradedLinearMap, INF, homology, sign, vadd, vscale, vsum
from .linalg import (
    LinearAlgebraError,
    Matrix,
    extend_basis,
    inconsistency_certificate,
    inverse,
    kernel_basis,
    rank_of,
    reduced_row_echelon,
    solve_linear,
)


class HodgeError(ValueError):
    pass


class PreconditionError(HodgeError):
    pass


def _cols(space, vecs, d):
    return [space.to_dense(v, d) for v in vecs]


def _span_rows(space, vecs, d):
    """RREF basis (sparse) of the span of ``vecs`` in degree d."""
    if not vecs:
        return []
    rk, _, red = reduced_row_echelon(Matrix(_cols(space, vecs, d), space.dim(d), space.field))
    return [space.to_sparse(red.rows[i], d) for i in range(rk)]


def boundary_basis(space, d):
    return _span_rows(space, [space.diff[i] for i in space.basis(d - 1)], d)


def combine(space, coeffs, vecs):
    return vsum(zip(coeffs, vecs))


# -- degenerate subspace and quotient -----------------------------------------

def degenerate_subspace(v, p):
    """Per degree, a basis of ``{x : <x, V> = 0}``."""
    out = {}
    F = v.field
    for d in range(0, v.max_degree + 1):
        if not v.dim(d):
            continue
        if d > p.degree:
            out[d] = [{i: F.one} for i in v.basis(d)]
            continue
        g = p.blocks[d]
        if g.ncols == 0:
            out[d] = [{i: F.one} for i in v.basis(d)]
            continue
        ker = kernel_basis(g.transpose())
        out[d] = [v.to_sparse(x, d) for x in ker]
    return out


def is_dg_ideal(v, perp):
    """Violations of D(P) ⊂ P and (for algebras) P∧V ⊂ P."""
    rep = []
    F = v.field

    def inside(x):
        d = v.degree_of(x)
        if d is None:
            return True
        vecs = perp.get(d, [])
        if not vecs:
            return False
        return solve_linear(Matrix.from_columns(_cols(v, vecs, d), v.dim(d), F), v.to_dense(x, d)) is not None

    for d, vecs in perp.items():
        for x in vecs:
            if not inside(v.d(x)):
                rep.append("D-closed: degree %d" % d)
            if isinstance(v, CDGA):
                for j in range(len(v)):
                    if v.truncation is not None and d + v.degrees[j] > v.truncation:
                        continue
                    if not inside(v.mul(x, {j: F.one})):
                        rep.append("ideal: degree %d times %s" % (d, v.names[j]))
    return rep


def subcomplex_homology_dims(v, sub):
    """``dim H^d`` of the subcomplex spanned by ``sub`` (a dg-subspace)."""
    F = v.field
    ranks = {}
    for d, vecs in sub.items():
        imgs = [v.d(x) for x in vecs]
        ranks[d] = rank_of(_cols(v, imgs, d + 1), v.dim(d + 1), F) if imgs else 0
    dims = {}
    for d, vecs in sub.items():
        dims[d] = len(vecs) - ranks[d] - ranks.get(d - 1, 0)
    return dims


def is_acyclic(v, sub):
    top = v.trusted_degree()
    dims = subcomplex_homology_dims(v, sub)
    return all(x == 0 for d, x in dims.items() if d <= top)


class Quotient:
    def __init__(self, algebra, projection, section, pairing, orientation, perp, quasi_iso, perp_homology):
        self.algebra = algebra
        self.projection = projection
        self.section = section
        self.pairing = pairing
        self.orientation = orientation
        self.perp = perp
        self.quasi_iso = quasi_iso
        self.perp_homology = perp_homology


def nondeg_quotient(v, p, orientation=None):
    """``V / V^⊥`` with its induced pairing and the projection."""
    from .algebra import CyclicPairing, Orientation

    F = v.field
    perp = degenerate_subspace(v, p)
    keep_idx = {}
    coords = {}
    names, degrees, reps = [], [], []
    for d in range(0, v.max_degree + 1):
        basis = v.basis(d)
        if not basis:
            continue
        P = _cols(v, perp.get(d, []), d)
        order = list(range(len(basis)))
        if isinstance(v, CDGA) and d == 0:
            u = v.position[v.unit]
            order = [u] + [k for k in order if k != u]
        std = []
        for k in order:
            e = [F.zero] * len(basis)
            e[k] = F.one
            std.append(e)
        kept = [order[i] for i in extend_basis(P, std, len(basis), F)]
        keep_idx[d] = kept
        if not kept:
            continue
        cols = []
        for k in kept:
            e = [F.zero] * len(basis)
            e[k] = F.one
            cols.append(e)
        cols += P
        inv = inverse(Matrix.from_columns(cols, len(basis), F))
        coords[d] = (len(degrees), inv, len(kept))
        for k in kept:
            names.append(v.names[basis[k]])
            degrees.append(d)
            reps.append({basis[k]: F.one})

    def project(x):
        out = {}
        for i, c in x.items():
            d = v.degrees[i]
            if d not in coords:
                continue
            off, inv, nk = coords[d]
            col = v.position[i]
            for r in range(nk):
                val = inv.rows[r][col]
                if val:
                    out = vadd(out, {off + r: val * c})
        return out

    diff = [project(v.d(r)) for r in reps]
    if isinstance(v, CDGA):
        mult = {}
        for i, ri in enumerate(reps):
            for j, rj in enumerate(reps):
                if v.truncation is not None and degrees[i] + degrees[j] > v.truncation:
                    continue
                pr = project(v.mul(ri, rj))
                if pr:
                    mult[(i, j)] = pr
        unit = names.index(v.names[v.unit])
        top = max(degrees) if degrees else 0
        trunc = v.truncation if v.truncation is not None and top >= v.truncation else None
        q = CDGA(names, degrees, diff, mult, unit, F, trunc)
    else:
        q = Complex(names, degrees, diff, F)
    proj = GradedLinearMap(v, q, [project({i: F.one}) for i in range(len(v))])
    section = GradedLinearMap(q, v, reps)
    n = p.degree
    blocks = {}
    for d in range(0, n + 1):
        rows = [[p(reps[i], reps[j]) for j in q.basis(n - d)] for i in q.basis(d)]
        blocks[d] = Matrix(rows, q.dim(n - d), F)
    qp = CyclicPairing(n, blocks, q)
    qor = None
    if orientation is not None:
        qor = Orientation(n, {i: orientation(reps[i]) for i in q.basis(n)}, q)
    dims = subcomplex_homology_dims(v, perp)
    top = v.trusted_degree()
    qi = all(x == 0 for d, x in dims.items() if d <= top)
    return Quotient(q, proj, section, qp, qor, perp, qi, {d: x for d, x in dims.items() if d <= top})


# -- decompositions -----------------------------------------------------------

class HodgeData:
    """``V = H ⊕ D(C) ⊕ C`` given by bases of H and C in each degree."""

    def __init__(self, space, pairing, H, C):
        self.space = space
        self.pairing = pairing
        self.H = {d: list(x) for d, x in H.items() if x}
        self.C = {d: list(x) for d, x in C.items() if x}

    @property
    def degree(self):
        return self.pairing.degree

    def B(self, d):
        return [self.space.d(c) for c in self.C.get(d - 1, [])]

    def dims(self):
        top = self.space.max_degree
        return {
            "H": [len(self.H.get(d, [])) for d in range(top + 1)],
            "C": [len(self.C.get(d, [])) for d in range(top + 1)],
            "B": [len(self.C.get(d - 1, [])) for d in range(top + 1)],
        }

    def copy(self, H=None, C=None):
        return HodgeData(self.space, self.pairing, H if H is not None else self.H, C if C is not None else self.C)


def check_hodge(hd):
    """Flags ``directSum``, ``hOrthogonal`` and ``hodge`` plus failures."""
    v, p = hd.space, hd.pairing
    F = v.field
    n = p.degree
    failures = []
    direct = True
    for d in range(0, v.max_degree + 1):
        H, B, C = hd.H.get(d, []), hd.B(d), hd.C.get(d, [])
        for h in H:
            if v.d(h):
                direct = False
                failures.append("harmonic vector not closed in degree %d" % d)
        vecs = H + B + C
        if len(vecs) != v.dim(d) or (vecs and rank_of(_cols(v, vecs, d), v.dim(d), F) != v.dim(d)):
            direct = False
            failures.append("H + DC + C is not a basis in degree %d" % d)
    horth = True
    hodge = True
    for d in range(0, n + 1):
        for c in hd.C.get(d, []):
            for h in hd.H.get(n - d, []):
                if p(c, h):
                    horth = False
                    failures.append("<C,H> != 0 in degrees (%d,%d)" % (d, n - d))
                    break
            for c2 in hd.C.get(n - d, []):
                if p(c, c2):
                    hodge = False
                    failures.append("<C,C> != 0 in degrees (%d,%d)" % (d, n - d))
                    break
    return {
        "directSum": direct,
        "hOrthogonal": direct and horth,
        "hodge": direct and horth and hodge,
        "failures": sorted(set(failures)),
    }


def harmonic_gram_inverses(hd_or_space, p, H):
    """Inverse of ``G_d^T`` for ``G_d = Gram(H^d, H^(n-d))``, per degree."""
    v = hd_or_space
    n = p.degree
    out = {}
    for d in range(0, n + 1):
        Hd, Hc = H.get(d, []), H.get(n - d, [])
        if len(Hd) != len(Hc):
            raise PreconditionError("homology pairing is degenerate: dim H^%d = %d, dim H^%d = %d" % (d, len(Hd), n - d, len(Hc)))
        if not Hd:
            continue
        g = p.gram(Hd, Hc)
        try:
            out[d] = inverse(g.transpose())
        except LinearAlgebraError:
            raise PreconditionError("homology pairing is degenerate in degrees (%d,%d)" % (d, n - d))
    return out


def harmonic_projection(v, p, H, invs=None):
    """The orthogonal projection onto H: ``<pi(x), h> = <x, h>``."""
    n = p.degree
    invs = invs if invs is not None else harmonic_gram_inverses(v, p, H)

    def pi(x):
        out = {}
        by_deg = {}
        for i, c in x.items():
            by_deg.setdefault(v.degrees[i], {})[i] = c
        for d, part in by_deg.items():
            if d not in invs:
                continue
            r = [p(part, h) for h in H[n - d]]
            coeffs = invs[d] @ r
            out = vadd(out, combine(v, coeffs, H[d]))
        return out

    return pi


def check_perfect_homology(v, p, H):
    n = p.degree
    harmonic_gram_inverses(v, p, H)
    top = v.trusted_degree()
    for d, vecs in H.items():
        if vecs and d > n and d <= top:
            raise PreconditionError("homology in degree %d above the pairing degree %d" % (d, n))


def coexact_complement(v, d):
    """Standard basis vectors completing ker D in degree d."""
    F = v.field
    ker = kernel_basis(v.diff_matrix(d))
    dim = v.dim(d)
    std = []
    for k in range(dim):
        e = [F.zero] * dim
        e[k] = F.one
        std.append(e)
    return [v.to_sparse(std[k], d) for k in extend_basis(ker, std, dim, F)]


def h_orthogonalize(v, p, H=None, C0=None):
    """H-orthogonal decomposition with ``C = (Id - pi_H)(C0)``."""
    if H is None:
        H = homology(v).reps
    check_perfect_homology(v, p, H)
    pi = harmonic_projection(v, p, H)
    C = {}
    for d in range(0, v.max_degree + 1):
        base = C0.get(d, []) if C0 is not None else coexact_complement(v, d)
        C[d] = [vadd(c, pi(c), -1) for c in base]
    return HodgeData(v, p, H, C)


# -- twists -------------------------------------------------------------------

class TwistResult:
    def __init__(self, feasible, mu=None, certificate=None, degree_pairs=None, unknowns=0, equations=0):
        self.feasible = feasible
        self.mu = mu
        self.certificate = certificate
        self.degree_pairs = degree_pairs or []
        self.unknowns = unknowns
        self.equations = equations

    def report(self):
        out = {
            "feasible": self.feasible,
            "degreePairs": [list(x) for x in self.degree_pairs],
            "unknowns": self.unknowns,
            "equations": self.equations,
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


def middle_degrees(n):
    return [n // 2] if n % 2 == 0 else [n // 2, n // 2 + 1]


def solve_twist(hd, degrees=None):
    """Solve ``<mu c1, c2> + <c1, mu c2> + <c1, c2> = 0`` for ``mu: C -> im D``.

    All ordered pairs of coexact basis vectors in complementary degrees are
    used as equations.  ``degrees`` restricts both unknowns and equations.
    """
    v, p = hd.space, hd.pairing
    F = v.field
    n = p.degree
    scope = set(range(0, n + 1)) if degrees is None else set(degrees)
    bnd = {d: boundary_basis(v, d) for d in scope}
    var = {}
    nvar = 0
    for d in sorted(scope):
        for a in range(len(hd.C.get(d, []))):
            for b in range(len(bnd[d])):
                var[(d, a, b)] = nvar
                nvar += 1
    rows, rhs, labels = [], [], []
    pairs = set()
    for d1 in sorted(scope):
        d2 = n - d1
        if d2 not in scope:
            continue
        C1, C2 = hd.C.get(d1, []), hd.C.get(d2, [])
        if not C1 or not C2:
            continue
        pairs.add((min(d1, d2), max(d1, d2)))
        # <B_b, c2> for b in bnd[d1];  <c1, B_g> for g in bnd[d2]
        left = [[p(bv, c2) for c2 in C2] for bv in bnd[d1]]
        right = [[p(c1, bv) for bv in bnd[d2]] for c1 in C1]
        for a, c1 in enumerate(C1):
            for b, c2 in enumerate(C2):
                row = [F.zero] * nvar
                for g in range(len(bnd[d1])):
                    row[var[(d1, a, g)]] = row[var[(d1, a, g)]] + left[g][b]
                for g in range(len(bnd[d2])):
                    row[var[(d2, b, g)]] = row[var[(d2, b, g)]] + right[a][g]
                rows.append(row)
                rhs.append(-p(c1, c2))
                labels.append((d1, a, d2, b))
    pairs = sorted(pairs)
    if not rows:
        mu = {d: [{} for _ in hd.C.get(d, [])] for d in scope}
        return TwistResult(True, mu, None, pairs, nvar, 0)
    m = Matrix(rows, nvar, F)
    x = solve_linear(m, rhs)
    if x is None:
        y = inconsistency_certificate(m, rhs)
        cert = {
            "combination": [
                {"pair": ["C%d[%d]" % (l[0], l[1]), "C%d[%d]" % (l[2], l[3])], "weight": str(c)}
                for l, c in zip(labels, y)
                if c
            ],
            "combinedRhs": str(sum((c * r for c, r in zip(y, rhs)), F.zero)),
            "coexact": {
                "C%d[%d]" % (d, a): v.format(c) for d in sorted(scope) for a, c in enumerate(hd.C.get(d, []))
            },
        }
        return TwistResult(False, None, cert, pairs, nvar, len(rows))
    mu = {}
    for d in scope:
        mu[d] = []
        for a in range(len(hd.C.get(d, []))):
            coeffs = [x[var[(d, a, b)]] for b in range(len(bnd[d]))]
            mu[d].append(combine(v, coeffs, bnd[d]))
    return TwistResult(True, mu, None, pairs, nvar, len(rows))


def twist_residuals(hd, mu):
    """Literal evaluation of the twist equation on every basis pair."""
    p = hd.pairing
    n = p.degree
    bad = []
    for d1, C1 in hd.C.items():
        d2 = n - d1
        for a, c1 in enumerate(C1):
            m1 = mu.get(d1, [{}] * len(C1))[a]
            for b, c2 in enumerate(hd.C.get(d2, [])):
                m2 = mu.get(d2, [{}] * len(hd.C[d2]))[b]
                val = p(m1, c2) + p(c1, m2) + p(c1, c2)
                if val:
                    bad.append((d1, a, d2, b, val))
    return bad


def apply_twist(hd, eta=None, mu1=None, mu2=None):
    """``H' = {h + eta h}``, ``C' = {c + mu1 c + mu2 c}`` and its flags."""
    H, C = {}, {}
    for d, vecs in hd.H.items():
        e = (eta or {}).get(d)
        H[d] = [vadd(h, e[i]) if e else h for i, h in enumerate(vecs)]
    for d, vecs in hd.C.items():
        m1 = (mu1 or {}).get(d)
        m2 = (mu2 or {}).get(d)
        out = []
        for i, c in enumerate(vecs):
            x = c
            if m1:
                x = vadd(x, m1[i])
            if m2:
                x = vadd(x, m2[i])
            out.append(x)
        C[d] = out
    new = hd.copy(H, C)
    return new, check_hodge(new)


def twist_to_hodge(hd, result=None):
    result = result or solve_twist(hd)
    if not result.feasible:
        return None
    new, flags = apply_twist(hd, mu2=result.mu)
    if not flags["hodge"]:
        raise HodgeError("twisted decomposition failed certification: %s" % flags["failures"])
    return new


def middle_degree_obstruction(hd):
    return solve_twist(hd, middle_degrees(hd.degree))


def coexact_perp(hd):
    """``C^⊥ ∩ C`` per degree, as combinations of the C basis."""
    v, p = hd.space, hd.pairing
    n = p.degree
    out = {}
    for d, Cd in hd.C.items():
        if d > n or n - d not in hd.C:
            out[d] = list(Cd)
            continue
        g = p.gram(Cd, hd.C[n - d])
        out[d] = [combine(v, k, Cd) for k in kernel_basis(g.transpose())]
    return out


def hodge_from_rho(hd, E, rho):
    """Hodge decomposition from ``rho: E^{>= ceil(n/2)} -> im D``.

    ``E[d]`` spans a complement of ``C^⊥ ∩ C`` in ``C^d``; ``rho[d]`` is a
    list parallel to ``E[d]``.
    """
    v, p = hd.space, hd.pairing
    F = v.field
    n = p.degree
    half = (n + 1) // 2
    CP = coexact_perp(hd)
    for d, Cd in hd.C.items():
        vecs = E.get(d, []) + CP.get(d, [])
        if len(vecs) != len(Cd) or rank_of(_cols(v, vecs + Cd, d), v.dim(d), F) != len(Cd):
            raise PreconditionError("E is not a complement of C^⊥∩C in degree %d" % d)
    for i in range(half, n + 1):
        Ei = E.get(i, [])
        if not Ei:
            continue
        if len(rho.get(i, [])) != len(Ei):
            raise PreconditionError("rho undefined on E^%d" % i)
        bnd = boundary_basis(v, i)
        for b, e2 in enumerate(Ei):
            r = rho[i][b]
            if r and (not bnd or solve_linear(Matrix.from_columns(_cols(v, bnd, i), v.dim(i), F), v.to_dense(r, i)) is None):
                raise PreconditionError("rho(E%d[%d]) is not exact" % (i, b))
            for a, e1 in enumerate(E.get(n - i, [])):
                if p(e1, r) != p(e1, e2):
                    raise PreconditionError("rho condition <e1, rho e2> = <e1, e2> fails for E%d[%d], E%d[%d]" % (n - i, a, i, b))
            for a, c in enumerate(CP.get(n - i, [])):
                if p(c, r):
                    raise PreconditionError("rho condition <c, rho e2> = 0 fails for perp[%d] in degree %d, E%d[%d]" % (a, n - i, i, b))
    C = {}
    half_f = F(1) / F(2)
    for d in set(hd.C):
        out = []
        for b, e in enumerate(E.get(d, [])):
            if d >= half and d <= n and rho.get(d):
                scale = -half_f if 2 * d == n else -F.one
                out.append(vadd(e, rho[d][b], scale))
            else:
                out.append(e)
        C[d] = out + CP.get(d, [])
    new = hd.copy(None, C)
    flags = check_hodge(new)
    if not flags["hodge"]:
        raise HodgeError("decomposition from rho failed certification: %s" % flags["failures"])
    return new


# -- standard homotopy --------------------------------------------------------

class Homotopy:
    def __init__(self, h, pi_h):
        self.h = h
        self.pi_h = pi_h


def standard_homotopy(hd):
    """``h(Dc) = -c`` on exact vectors, zero on ``H ⊕ C``."""
    v = hd.space
    F = v.field
    h_img = [None] * len(v)
    pi_img = [None] * len(v)
    for d in range(0, v.max_degree + 1):
        basis = v.basis(d)
        if not basis:
            continue
        H, B, C = hd.H.get(d, []), hd.B(d), hd.C.get(d, [])
        Cprev = hd.C.get(d - 1, [])
        vecs = H + B + C
        if len(vecs) != len(basis):
            raise HodgeError("decomposition does not fit degree %d" % d)
        try:
            inv = inverse(Matrix.from_columns(_cols(v, vecs, d), len(basis), F))
        except LinearAlgebraError:
            raise HodgeError("H + D(C) + C is not a basis in degree %d (D not injective on C?)" % d)
        nh, nb = len(H), len(B)
        for col, i in enumerate(basis):
            co = [inv.rows[r][col] for r in range(len(vecs))]
            pi_img[i] = combine(v, co[:nh], H)
            h_img[i] = vscale(combine(v, co[nh:nh + nb], Cprev), -1)
    h = GradedLinearMap(v, v, h_img, shift=-1)
    pi = GradedLinearMap(v, v, pi_img)
    return Homotopy(h, pi)


def check_homotopy(hd, hom):
    """Exact check of ``hD + Dh = pi_H - Id``, ``h∘h = 0`` and ``h(H ⊕ C) = 0``."""
    v = hd.space
    F = v.field
    h = hom.h
    bad = []
    for i in range(len(v)):
        e = {i: F.one}
        lhs = vadd(h(v.diff[i]), v.d(h.images[i]))
        rhs = vadd(hom.pi_h.images[i], e, -1)
        if lhs != rhs:
            bad.append("commRel: %s" % v.names[i])
    hh = [v.names[i] for i in range(len(v)) if h(h.images[i])]
    vanish = True
    for d in set(hd.H) | set(hd.C):
        for x in hd.H.get(d, []) + hd.C.get(d, []):
            if h(x):
                vanish = False
    return {
        "commRel": not bad,
        "hSquaredZero": not hh,
        "vanishesOnHC": vanish,
        "failures": bad + ["h∘h: %s" % x for x in hh],
    }


def hodge_decomposition(v, p):
    """H-orthogonalize then twist; returns ``(HodgeData | None, TwistResult, H-orthogonal data)``."""
    ho = h_orthogonalize(v, p)
    tw = solve_twist(ho)
    return (twist_to_hodge(ho, tw) if tw.feasible else None), tw, ho
