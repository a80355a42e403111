"""Finite (or degree-truncated) cochain complexes and unital CDGAs.

Elements are sparse dicts ``{basis_index: coefficient}``.  A truncated
algebra is the quotient by everything of degree above ``truncation``;
its homology is only meaningful up to ``truncation - 1``.

Sign convention: moving ``x`` past ``y`` costs ``(-1)**(deg x * deg y)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from .field import QQ
from .linalg import Matrix, extend_basis, kernel_basis, rank_of, reduced_row_echelon, solve_linear


class AlgebraError(ValueError):
    pass


INF = float("inf")


# -- sparse vectors -----------------------------------------------------------

def vadd(u, v, c=1):
    """``u + c*v`` as a new sparse vector."""
    out = dict(u)
    for k, x in v.items():
        y = out.get(k)
        s = x * c if y is None else y + x * c
        if s:
            out[k] = s
        elif y is not None:
            del out[k]
    return out


def vscale(u, c):
    if not c:
        return {}
    return {k: x * c for k, x in u.items()}


def vsum(terms):
    out = {}
    for c, v in terms:
        if c:
            out = vadd(out, v, c)
    return out


def sign(e):
    return -1 if e % 2 else 1


# -- complexes ----------------------------------------------------------------

class Complex:
    """Cochain complex with a named basis; ``diff[i]`` is D of basis vector i."""

    def __init__(self, names, degrees, diff=None, field=QQ):
        if len(names) != len(degrees):
            raise AlgebraError("names and degrees differ in length")
        if len(set(names)) != len(names):
            raise AlgebraError("duplicate basis names")
        for d in degrees:
            if d < 0:
                raise AlgebraError("negative degree %d" % d)
        self.field = field
        self.names = list(names)
        self.degrees = list(degrees)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.by_degree = {}
        self.position = []
        for i, d in enumerate(self.degrees):
            lst = self.by_degree.setdefault(d, [])
            self.position.append(len(lst))
            lst.append(i)
        if diff is None:
            diff = [{} for _ in names]
        self.diff = [{k: field(c) for k, c in v.items() if c} for v in diff]
        self.truncation = None

    def __len__(self):
        return len(self.names)

    @property
    def max_degree(self):
        return max(self.degrees) if self.degrees else -1

    def basis(self, d):
        return self.by_degree.get(d, [])

    def dim(self, d):
        return len(self.by_degree.get(d, ()))

    def dims(self, upto=None):
        top = self.max_degree if upto is None else upto
        return [self.dim(d) for d in range(top + 1)]

    def trusted_degree(self):
        """Largest degree whose homology is unaffected by truncation."""
        return INF if self.truncation is None else self.truncation - 1

    def degree_of(self, vec):
        ds = {self.degrees[i] for i in vec}
        if len(ds) > 1:
            raise AlgebraError("inhomogeneous vector")
        return ds.pop() if ds else None

    def e(self, name_or_index):
        i = self.index[name_or_index] if isinstance(name_or_index, str) else name_or_index
        return {i: self.field.one}

    def d(self, vec):
        return vsum((c, self.diff[i]) for i, c in vec.items())

    def to_dense(self, vec, d):
        out = [self.field.zero] * self.dim(d)
        for i, c in vec.items():
            if self.degrees[i] != d:
                raise AlgebraError("component %s not in degree %d" % (self.names[i], d))
            out[self.position[i]] = c
        return out

    def to_sparse(self, coords, d):
        return {i: c for i, c in zip(self.basis(d), coords) if c}

    def diff_matrix(self, d):
        """Matrix of D: V^d -> V^(d+1) (columns indexed by V^d)."""
        src = self.basis(d)
        rows = self.dim(d + 1)
        cols = [self.to_dense(self.diff[i], d + 1) for i in src]
        return Matrix.from_columns(cols, rows, self.field) if cols else Matrix.zeros(rows, 0, self.field)

    def format(self, vec):
        if not vec:
            return "0"
        parts = []
        for i in sorted(vec):
            c = vec[i]
            parts.append(self.names[i] if c == 1 else "%s*%s" % (c, self.names[i]))
        return " + ".join(parts)


class CDGA(Complex):
    """Unital commutative DGA given by sparse structure constants.

    ``mult[(i, j)]`` is the product of basis vectors i and j; missing
    pairs multiply to zero.  Products with the unit are implied.
    """

    def __init__(self, names, degrees, diff=None, mult=None, unit=0, field=QQ, truncation=None, presentation=None):
        super().__init__(names, degrees, diff, field)
        if self.degrees[unit] != 0:
            raise AlgebraError("unit must have degree 0")
        self.unit = unit
        self.truncation = truncation
        self.presentation = presentation
        self.mult = {}
        for (i, j), v in (mult or {}).items():
            v = {k: field(c) for k, c in v.items() if c}
            if v:
                self.mult[(i, j)] = v
        one = {unit: field.one}
        for i in range(len(self.names)):
            self.mult.setdefault((unit, i), {i: field.one})
            self.mult.setdefault((i, unit), {i: field.one})
        self.mult[(unit, unit)] = one

    def basis_product(self, i, j):
        return self.mult.get((i, j), {})

    def mul(self, x, y):
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                p = self.mult.get((i, j))
                if p:
                    out = vadd(out, p, a * b)
        return out

    def one(self):
        return {self.unit: self.field.one}


# -- orientations and pairings ------------------------------------------------

class Orientation:
    """Nonzero functional on the degree-n component."""

    def __init__(self, degree, values, space):
        vals = {k: space.field(c) for k, c in values.items() if c}
        for k in vals:
            if space.degrees[k] != degree:
                raise AlgebraError("orientation value on %s outside degree %d" % (space.names[k], degree))
        if not vals:
            raise AlgebraError("orientation must be nonzero")
        self.degree = degree
        self.values = vals
        self.field = space.field

    def __call__(self, vec):
        s = self.field.zero
        for i, c in vec.items():
            v = self.values.get(i)
            if v:
                s = s + c * v
        return s

    def scaled(self, c, space):
        return Orientation(self.degree, {k: v * c for k, v in self.values.items()}, space)

    def annihilates_boundaries(self, v):
        bad = []
        for i in v.basis(self.degree - 1):
            if self(v.diff[i]):
                bad.append(v.names[i])
        return bad


class CyclicPairing:
    """Bilinear form of degree -n: ``blocks[d]`` pairs V^d with V^(n-d)."""

    def __init__(self, degree, blocks, space):
        self.degree = degree
        self.space = space
        self.field = space.field
        self.blocks = {}
        for d in range(0, degree + 1):
            r, c = space.dim(d), space.dim(degree - d)
            m = blocks.get(d)
            if m is None:
                m = Matrix.zeros(r, c, self.field)
            if (m.nrows, m.ncols) != (r, c):
                raise AlgebraError("pairing block %d has shape %dx%d, expected %dx%d" % (d, m.nrows, m.ncols, r, c))
            self.blocks[d] = m

    def basis_value(self, i, j):
        sp = self.space
        di, dj = sp.degrees[i], sp.degrees[j]
        if di + dj != self.degree:
            return self.field.zero
        return self.blocks[di].rows[sp.position[i]][sp.position[j]]

    def __call__(self, x, y):
        s = self.field.zero
        sp = self.space
        for i, a in x.items():
            di = sp.degrees[i]
            dj = self.degree - di
            if dj < 0 or di > self.degree:
                continue
            row = self.blocks[di].rows[sp.position[i]]
            for j, b in y.items():
                if sp.degrees[j] == dj:
                    v = row[sp.position[j]]
                    if v:
                        s = s + a * b * v
        return s

    def gram(self, xs, ys):
        return Matrix([[self(x, y) for y in ys] for x in xs], len(ys), self.field)

    def is_zero(self):
        return all(m.is_zero() for m in self.blocks.values())

    def scaled(self, c):
        return CyclicPairing(self.degree, {d: Matrix([[x * c for x in r] for r in m.rows], m.ncols, self.field) for d, m in self.blocks.items()}, self.space)


def pairing_from_orientation(a, orientation):
    """``<x, y> = Or(x y)``."""
    n = orientation.degree
    blocks = {}
    for d in range(0, n + 1):
        rows = []
        for i in a.basis(d):
            rows.append([orientation(a.basis_product(i, j)) for j in a.basis(n - d)])
        blocks[d] = Matrix(rows, a.dim(n - d), a.field)
    return CyclicPairing(n, blocks, a)


def orientation_from_pairing(p, a):
    """``Or(v) = <v, 1>``."""
    if p.is_zero():
        raise AlgebraError("zero pairing induces no orientation")
    one = a.one()
    vals = {i: p({i: a.field.one}, one) for i in a.basis(p.degree)}
    return Orientation(p.degree, vals, a)


# -- axiom checks -------------------------------------------------------------

def check_complex(v):
    rep = []
    for i, img in enumerate(v.diff):
        for k in img:
            if v.degrees[k] != v.degrees[i] + 1:
                rep.append("D-degree: D(%s) has component %s of degree %d" % (v.names[i], v.names[k], v.degrees[k]))
    if rep:
        return rep
    for i in range(len(v)):
        dd = v.d(v.diff[i])
        if dd:
            rep.append("D∘D: D(D(%s)) = %s" % (v.names[i], v.format(dd)))
    return rep


def check_cdga(a, associativity=True):
    """List of violated axioms, each with a witnessing basis tuple."""
    rep = check_complex(a)
    degree_ok = not rep
    T = a.truncation
    n = len(a)
    deg = a.degrees
    for (i, j), p in a.mult.items():
        for k in p:
            if deg[k] != deg[i] + deg[j]:
                rep.append("product-degree: %s*%s has component %s" % (a.names[i], a.names[j], a.names[k]))
                degree_ok = False
    if a.diff[a.unit]:
        rep.append("D1: D(1) = %s" % a.format(a.diff[a.unit]))
    for i in range(n):
        if a.basis_product(a.unit, i) != {i: a.field.one} or a.basis_product(i, a.unit) != {i: a.field.one}:
            rep.append("unit: 1*%s" % a.names[i])
    if not degree_ok:
        return rep
    for i in range(n):
        for j in range(n):
            if T is not None and deg[i] + deg[j] > T:
                continue
            x = a.basis_product(i, j)
            y = vscale(a.basis_product(j, i), sign(deg[i] * deg[j]))
            if x != y:
                rep.append("commutativity: %s*%s" % (a.names[i], a.names[j]))
            lhs = a.d(x)
            rhs = vadd(a.mul(a.diff[i], {j: a.field.one}), a.mul({i: a.field.one}, a.diff[j]), sign(deg[i]))
            if lhs != rhs:
                rep.append("Leibniz: D(%s*%s)" % (a.names[i], a.names[j]))
    if associativity:
        for i in range(n):
            if i == a.unit:
                continue
            for j in range(n):
                if j == a.unit or (T is not None and deg[i] + deg[j] > T):
                    continue
                ij = a.basis_product(i, j)
                for k in range(n):
                    if k == a.unit or (T is not None and deg[i] + deg[j] + deg[k] > T):
                        continue
                    left = a.mul(ij, {k: a.field.one})
                    right = a.mul({i: a.field.one}, a.basis_product(j, k))
                    if left != right:
                        rep.append("associativity: (%s,%s,%s)" % (a.names[i], a.names[j], a.names[k]))
    return rep


def check_cyclic(v, p):
    """Graded symmetry, D-cyclicity and (for algebras) product cyclicity."""
    rep = []
    n = p.degree
    deg = v.degrees
    one = v.field.one
    idx = range(len(v))
    for i in idx:
        for j in v.basis(n - deg[i]) if n - deg[i] >= 0 else ():
            if p.basis_value(i, j) != sign(deg[i] * deg[j]) * p.basis_value(j, i):
                rep.append("symmetry: <%s,%s>" % (v.names[i], v.names[j]))
    for i in idx:
        for j in v.basis(n - 1 - deg[i]) if n - 1 - deg[i] >= 0 else ():
            lhs = p(v.diff[i], {j: one})
            rhs = sign(1 + deg[i] * deg[j]) * p(v.diff[j], {i: one})
            if lhs != rhs:
                rep.append("D-cyclic: <D%s,%s>" % (v.names[i], v.names[j]))
    if isinstance(v, CDGA):
        for i in idx:
            for j in idx:
                if deg[i] + deg[j] > n:
                    continue
                ij = v.basis_product(i, j)
                for k in v.basis(n - deg[i] - deg[j]):
                    lhs = p(ij, {k: one})
                    rhs = sign(deg[k] * (deg[i] + deg[j])) * p(v.basis_product(k, i), {j: one})
                    if lhs != rhs:
                        rep.append("product-cyclic: <%s*%s,%s>" % (v.names[i], v.names[j], v.names[k]))
    return rep


# -- homology -----------------------------------------------------------------

class HomologyData:
    """Per degree: cycle representatives of a homology basis, a boundary
    basis, and the map sending a cycle to its class coordinates."""

    def __init__(self, space, reps, boundaries, cycle_dims, trusted):
        self.space = space
        self.reps = reps
        self.boundaries = boundaries
        self.cycle_dims = cycle_dims
        self.trusted = trusted

    def dim(self, d):
        return len(self.reps.get(d, ()))

    def dims(self, upto=None):
        top = self.space.max_degree if upto is None else upto
        return [self.dim(d) for d in range(top + 1)]

    def degrees(self):
        return sorted(d for d in self.reps if self.reps[d])

    def class_of(self, vec, d):
        """Coordinates of [vec] in the representative basis of H^d."""
        sp = self.space
        reps = self.reps.get(d, [])
        bds = self.boundaries.get(d, [])
        if not vec:
            return [sp.field.zero] * len(reps)
        cols = [sp.to_dense(r, d) for r in reps] + [sp.to_dense(b, d) for b in bds]
        if not cols:
            raise AlgebraError("vector is not a cycle")
        m = Matrix.from_columns(cols, sp.dim(d), sp.field)
        x = solve_linear(m, sp.to_dense(vec, d))
        if x is None:
            raise AlgebraError("vector is not a cycle in degree %d" % d)
        return x[: len(reps)]


def homology(v):
    """Homology with representatives picked from the kernel basis in order."""
    reps, bds, zdims = {}, {}, {}
    f = v.field
    for d in range(0, v.max_degree + 1):
        dim = v.dim(d)
        if not dim:
            continue
        z = kernel_basis(v.diff_matrix(d))
        zdims[d] = len(z)
        prev = v.basis(d - 1)
        images = [v.to_dense(v.diff[i], d) for i in prev]
        if images:
            rk, piv, red = reduced_row_echelon(Matrix(images, dim, f))
            b = [red.rows[r] for r in range(rk)]
        else:
            b = []
        kept = extend_basis(b, z, dim, f)
        reps[d] = [v.to_sparse(z[i], d) for i in kept]
        bds[d] = [v.to_sparse(x, d) for x in b]
    return HomologyData(v, reps, bds, zdims, v.trusted_degree())


def induced_orientation(orientation, h):
    """Values of Or on the representative basis of H^n."""
    vals = [orientation(r) for r in h.reps.get(orientation.degree, [])]
    return vals


def induced_pairing(p, h):
    """Gram blocks of the homology pairing on representatives."""
    n = p.degree
    return {d: p.gram(h.reps.get(d, []), h.reps.get(n - d, [])) for d in range(0, n + 1)}


def gram_nondegenerate(blocks, n):
    for d in range(0, n + 1):
        m = blocks[d]
        if m.nrows != m.ncols or m.rank() != m.nrows:
            return False
    return True


def classify(a, orientation, h=None):
    h = h or homology(a)
    n = orientation.degree
    top = h.trusted if h.trusted != INF else a.max_degree
    hp = induced_pairing(pairing_from_orientation(a, orientation), h)
    h_above = any(h.dim(d) for d in range(n + 1, int(min(top, a.max_degree)) + 1))
    is_pdga = gram_nondegenerate(hp, n) and not h_above and any(induced_orientation(orientation, h))
    p = pairing_from_orientation(a, orientation)
    is_dpd = (
        gram_nondegenerate(p.blocks, n)
        and a.max_degree <= n
        and (a.truncation is None or a.truncation >= n)
    )
    connected = a.dim(0) == 1
    return {
        "isPDGA": is_pdga,
        "isDPD": is_dpd,
        "connected": connected,
        "simplyConnected": connected and a.dim(1) == 0,
        "homologyConnected": h.dim(0) == 1,
        "homologySimplyConnected": h.dim(0) == 1 and h.dim(1) == 0,
        "degree": n,
    }


# -- free algebras and tensor products ----------------------------------------

@dataclass
class FreePresentation:
    """Free graded-commutative algebra on named generators of degree >= 1.

    ``differential`` maps a generator name to a list of ``(monomial, coeff)``
    with monomials written like ``"a^2*b"``.
    """

    generators: list
    differential: dict = dc_field(default_factory=dict)
    truncation: int = 0
    field: object = QQ

    def names(self):
        return [g for g, _ in self.generators]


def parse_monomial(text, names):
    exps = [0] * len(names)
    text = text.strip()
    if text in ("1", ""):
        return tuple(exps)
    pos = {n: i for i, n in enumerate(names)}
    for factor in text.split("*"):
        factor = factor.strip()
        if "^" in factor:
            g, e = factor.split("^")
            e = int(e)
        else:
            g, e = factor, 1
        if g not in pos:
            raise AlgebraError("unknown generator %r in monomial %r" % (g, text))
        exps[pos[g]] += e
    return tuple(exps)


def monomial_name(exps, names):
    parts = []
    for g, e in zip(names, exps):
        if e == 1:
            parts.append(g)
        elif e > 1:
            parts.append("%s^%d" % (g, e))
    return "*".join(parts) if parts else "1"


def _monomials(degs, T):
    out = []

    def rec(i, cur, deg):
        if i == len(degs):
            out.append((deg, tuple(cur)))
            return
        emax = 1 if degs[i] % 2 else (T - deg) // degs[i]
        for e in range(0, emax + 1):
            if deg + e * degs[i] > T:
                break
            cur.append(e)
            rec(i + 1, cur, deg + e * degs[i])
            cur.pop()

    rec(0, [], 0)
    out.sort(key=lambda t: (t[0], tuple(-e for e in t[1])))
    return out


def monomial_product(a, b, degs):
    """Sign and exponent of x^a * x^b in the free graded-commutative algebra."""
    e = 0
    for i, (x, y) in enumerate(zip(a, b)):
        if degs[i] % 2 and x + y > 1:
            return 0, None
    for i in range(len(a)):
        if not (a[i] and degs[i] % 2):
            continue
        for j in range(i):
            if b[j] and degs[j] % 2:
                e += a[i] * b[j]
    return sign(e), tuple(x + y for x, y in zip(a, b))


def build_truncated_free(p):
    """Truncated free CDGA; basis ordered by degree then exponents, descending."""
    names = p.names()
    degs = [d for _, d in p.generators]
    for g, d in p.generators:
        if d < 1:
            raise AlgebraError("generator %s must have degree >= 1" % g)
    T = p.truncation
    F = p.field
    mons = _monomials(degs, T)
    exps = [m for _, m in mons]
    index = {m: i for i, m in enumerate(exps)}
    mult = {}
    for i, a in enumerate(exps):
        for j, b in enumerate(exps):
            if mons[i][0] + mons[j][0] > T:
                continue
            s, c = monomial_product(a, b, degs)
            if s and c in index:
                mult[(i, j)] = {index[c]: F(s)}
    infinite = any(d % 2 == 0 for d in degs)
    full_degree = sum(d for d in degs if d % 2)
    cut = infinite or full_degree > T
    mon_names = [monomial_name(m, names) for m in exps]
    alg = CDGA(mon_names, [d for d, _ in mons], None, mult, 0, F, T if cut else None, presentation=p)
    gen_d = []
    for g, d in p.generators:
        terms = {}
        for mono, c in p.differential.get(g, []):
            e = parse_monomial(mono, names)
            md = sum(x * y for x, y in zip(e, degs))
            if md != d + 1:
                raise AlgebraError("D(%s) has a term %s of degree %d, expected %d" % (g, mono, md, d + 1))
            if any(x > 1 for x, y in zip(e, degs) if y % 2):
                continue
            if md <= T:
                terms = vadd(terms, {index[e]: F(c)})
        gen_d.append(terms)
    diff = [None] * len(exps)
    for i, e in enumerate(exps):
        if i == 0:
            diff[i] = {}
            continue
        g = next(k for k, x in enumerate(e) if x)
        rest = list(e)
        rest[g] -= 1
        rest = index[tuple(rest)]
        gvec = {index[tuple(1 if k == g else 0 for k in range(len(e)))]: F(1)}
        # e = x_g * rest up to the sign of moving x_g to the front (x_g is leftmost, so +1)
        dx = alg.mul(gen_d[g], {rest: F(1)})
        dr = diff[rest]
        term2 = alg.mul(gvec, dr)
        diff[i] = vadd(dx, term2, sign(degs[g]))
    alg.diff = diff
    for g, (gname, d) in enumerate(p.generators):
        gi = index[tuple(1 if k == g else 0 for k in range(len(degs)))] if d <= T else None
        if gi is None:
            continue
        dd = alg.d(alg.diff[gi])
        if dd:
            raise AlgebraError("D∘D(%s) = %s is nonzero" % (gname, alg.format(dd)))
    alg.exponents = exps
    return alg


def tensor_product(a, b, T=None):
    """``a ⊗ b`` truncated at T, with the two inclusion maps."""
    if a.field != b.field:
        raise AlgebraError("tensor factors over different fields")
    F = a.field
    limits = [t for t in (T, a.truncation, b.truncation) if t is not None]
    T = min(limits) if limits else None
    pairs = []
    for i in range(len(a)):
        for j in range(len(b)):
            d = a.degrees[i] + b.degrees[j]
            if T is None or d <= T:
                pairs.append((d, i, j))
    pairs.sort()
    cut = T is not None and len(pairs) < len(a) * len(b)
    index = {(i, j): k for k, (_, i, j) in enumerate(pairs)}
    names = []
    for _, i, j in pairs:
        if j == b.unit:
            names.append(a.names[i])
        elif i == a.unit:
            names.append(b.names[j])
        else:
            names.append("%s*%s" % (a.names[i], b.names[j]))
    if len(set(names)) != len(names):
        names = ["(%s)⊗(%s)" % (a.names[i], b.names[j]) for _, i, j in pairs]
    degrees = [d for d, _, _ in pairs]

    def embed(x, y):
        out = {}
        for i, c in x.items():
            for j, e in y.items():
                k = index.get((i, j))
                if k is not None:
                    out = vadd(out, {k: c * e})
        return out

    diff = []
    for _, i, j in pairs:
        t1 = embed(a.diff[i], {j: F.one})
        t2 = embed({i: F.one}, b.diff[j])
        diff.append(vadd(t1, t2, sign(a.degrees[i])))
    mult = {}
    for k1, (d1, i1, j1) in enumerate(pairs):
        for k2, (d2, i2, j2) in enumerate(pairs):
            if T is not None and d1 + d2 > T:
                continue
            pa = a.basis_product(i1, i2)
            pb = b.basis_product(j1, j2)
            if pa and pb:
                v = embed(pa, pb)
                if v:
                    mult[(k1, k2)] = vscale(v, sign(b.degrees[j1] * a.degrees[i2]))
    out = CDGA(names, degrees, diff, mult, index[(a.unit, b.unit)], F, T if cut else None)
    out.pairs = [(i, j) for _, i, j in pairs]
    inc_a = GradedLinearMap(a, out, [embed({i: F.one}, {b.unit: F.one}) for i in range(len(a))])
    inc_b = GradedLinearMap(b, out, [embed({a.unit: F.one}, {j: F.one}) for j in range(len(b))])
    return out, inc_a, inc_b


# -- maps ---------------------------------------------------------------------

class GradedLinearMap:
    """``images[i]`` is the image of source basis vector i."""

    def __init__(self, source, target, images, shift=0):
        if len(images) != len(source):
            raise AlgebraError("map needs %d images, got %d" % (len(source), len(images)))
        self.source = source
        self.target = target
        self.shift = shift
        self.images = [{k: target.field(c) for k, c in v.items() if c} for v in images]
        for i, v in enumerate(self.images):
            for k in v:
                if target.degrees[k] != source.degrees[i] + shift:
                    raise AlgebraError("image of %s has component %s of wrong degree" % (source.names[i], target.names[k]))

    def __call__(self, vec):
        return vsum((c, self.images[i]) for i, c in vec.items())

    def matrix(self, d):
        src = self.source.basis(d)
        cols = [self.target.to_dense(self.images[i], d + self.shift) for i in src]
        rows = self.target.dim(d + self.shift)
        return Matrix.from_columns(cols, rows, self.target.field) if cols else Matrix.zeros(rows, 0, self.target.field)

    def compose(self, other):
        """``self ∘ other``."""
        return GradedLinearMap(other.source, self.target, [self(v) for v in other.images], self.shift + other.shift)

    @classmethod
    def identity(cls, v):
        return cls(v, v, [{i: v.field.one} for i in range(len(v))])


def morphism_from_generators(src, target, images):
    """Extend generator images multiplicatively over a truncated free algebra."""
    p = src.presentation
    if p is None:
        raise AlgebraError("source has no free presentation")
    names = p.names()
    degs = [d for _, d in p.generators]
    F = target.field
    gen_img = [images.get(g, {}) for g in names]
    out = []
    for e in src.exponents:
        v = target.one()
        for g, k in enumerate(e):
            for _ in range(k):
                v = target.mul(v, gen_img[g])
        out.append(v)
    return GradedLinearMap(src, target, out)


def check_morphism(f, a, or_a=None, b=None, or_b=None):
    """Flags for a degree-0 map between CDGAs.

    Homology is compared only in degrees unaffected by truncation on
    either side.
    """
    b = b or f.target
    F = a.field
    one = F.one
    failures = []
    ta, tb = a.truncation, b.truncation
    chain = True
    for i in range(len(a)):
        if ta is not None and a.degrees[i] >= ta:
            continue
        if f(a.diff[i]) != b.d(f.images[i]):
            chain = False
            failures.append("chain: %s" % a.names[i])
    mult = True
    for i in range(len(a)):
        for j in range(len(a)):
            if ta is not None and a.degrees[i] + a.degrees[j] > ta:
                continue
            if f(a.basis_product(i, j)) != b.mul(f.images[i], f.images[j]):
                mult = False
                failures.append("multiplicative: %s*%s" % (a.names[i], a.names[j]))
    unital = f.images[a.unit] == b.one()
    if not unital:
        failures.append("unital")
    ha, hb = homology(a), homology(b)
    top = min(ha.trusted, hb.trusted, max(a.max_degree, b.max_degree))
    qi = chain
    if chain:
        for d in range(0, int(top) + 1):
            reps = ha.reps.get(d, [])
            if len(reps) != hb.dim(d):
                qi = False
                failures.append("quasi-iso: dim H^%d %d vs %d" % (d, len(reps), hb.dim(d)))
                continue
            if not reps:
                continue
            cols = [hb.class_of(f(r), d) for r in reps]
            if rank_of(cols, hb.dim(d), F) != len(reps):
                qi = False
                failures.append("quasi-iso: H^%d not bijective" % d)
    compat = None
    if or_a is not None and or_b is not None:
        compat = or_a.degree == or_b.degree and chain
        if compat:
            for r in ha.reps.get(or_a.degree, []):
                if or_b(f(r)) != or_a(r):
                    compat = False
                    failures.append("orientation: %s" % a.format(r))
    return {
        "chainMap": chain,
        "multiplicative": mult,
        "unital": unital,
        "quasiIso": qi,
        "orientationCompatible": compat,
        "checkedDegrees": int(top),
        "failures": failures,
    }
