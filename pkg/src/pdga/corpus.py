"""Built-in example algebras and random instance generators."""

from __future__ import annotations

import random

from .algebra import (
    CDGA,
    Complex,
    CyclicPairing,
    FreePresentation,
    GradedLinearMap,
    Orientation,
    build_truncated_free,
    morphism_from_generators,
    sign,
    tensor_product,
    vadd,
)
from .field import QQ
from .linalg import Matrix, inverse, kernel_basis


def from_tables(names, degrees, diff=None, products=None, field=QQ, truncation=None, unit=None):
    """CDGA from name-keyed tables; missing opposite products follow graded commutativity."""
    index = {n: i for i, n in enumerate(names)}
    dv = [{} for _ in names]
    for src, img in (diff or {}).items():
        dv[index[src]] = {index[k]: field(c) for k, c in img.items()}
    mult = {}
    for (x, y), img in (products or {}).items():
        mult[(index[x], index[y])] = {index[k]: field(c) for k, c in img.items()}
    for (i, j), img in list(mult.items()):
        if (j, i) not in mult:
            s = sign(degrees[i] * degrees[j])
            mult[(j, i)] = {k: c * s for k, c in img.items()}
    u = index[unit] if unit is not None else degrees.index(0)
    return CDGA(names, degrees, dv, mult, u, field, truncation)


def orient(a, values):
    vals = {a.index[k]: a.field(c) for k, c in values.items()}
    deg = a.degrees[next(iter(vals))]
    return Orientation(deg, vals, a)


def v1(field=QQ):
    """H(Λ(a,b,c)) with zero differential, top class ac in degree 7."""
    a = from_tables(["1", "a", "c", "ac"], [0, 2, 5, 7], products={("a", "c"): {"ac": 1}}, field=field)
    return a, orient(a, {"ac": 1})


def v2(field=QQ):
    a = from_tables(
        ["1", "k", "w", "z", "l", "v"],
        [0, 2, 3, 4, 5, 7],
        diff={"w": {"z": 1}},
        products={
            ("k", "k"): {"z": 1},
            ("k", "w"): {"l": 1},
            ("k", "l"): {"v": 1},
            ("z", "w"): {"v": 1},
        },
        field=field,
    )
    return a, orient(a, {"v": 1})


def lambda_abc(truncation=9, field=QQ):
    p = FreePresentation([("a", 2), ("b", 3), ("c", 5)], {"b": [("a^2", "1")]}, truncation, field)
    a = build_truncated_free(p)
    return a, orient(a, {"a*c": 1})


def f1(lam, target):
    F = target.field
    return morphism_from_generators(lam, target, {"a": {target.index["a"]: F.one}, "c": {target.index["c"]: F.one}})


def f2(lam, target):
    F = target.field
    return morphism_from_generators(
        lam,
        target,
        {"a": {target.index["k"]: F.one}, "b": {target.index["w"]: F.one}, "c": {target.index["l"]: F.one}},
    )


def cp2_sum(count=7, signs=None, field=QQ):
    """Cohomology ring of a connected sum of ``count`` copies of CP^2."""
    signs = signs or [1] * count
    names = ["1"] + ["k%d" % i for i in range(count)] + ["v"]
    degrees = [0] + [2] * count + [4]
    prods = {("k%d" % i, "k%d" % i): {"v": signs[i]} for i in range(count)}
    a = from_tables(names, degrees, products=prods, field=field)
    return a, orient(a, {"v": 1})


def exterior(degrees=(3, 5, 7, 9, 11), field=QQ):
    gens = [("e%d" % d, d) for d in degrees]
    top = sum(degrees)
    a = build_truncated_free(FreePresentation(gens, {}, top, field))
    return a, orient(a, {"*".join(g for g, _ in gens): 1})


def acyclic_wz(deg_w=3, truncation=8, field=QQ):
    p = FreePresentation([("w", deg_w), ("z", deg_w + 1)], {"w": [("z", "1")]}, truncation, field)
    return build_truncated_free(p), None


def middle_obstruction_n2(field=QQ):
    """Degree-2 PDGA with ``<c1, c2> = 1`` in degree 1 and no exact vectors there."""
    a = from_tables(
        ["1", "c1", "c2", "b1", "b2", "v"],
        [0, 1, 1, 2, 2, 2],
        diff={"c1": {"b1": 1}, "c2": {"b2": 1}},
        products={("c1", "c2"): {"v": 1}},
        field=field,
    )
    return a, orient(a, {"v": 1})


EXAMPLES = {
    "v1": v1,
    "v2": v2,
    "lambda-abc": lambda_abc,
    "cp2-sum7": cp2_sum,
    "exterior-3-5-7-9-11": exterior,
    "acyclic-wz": acyclic_wz,
    "middle-obstruction-n2": middle_obstruction_n2,
}


def example(name, field=QQ):
    try:
        builder = EXAMPLES[name]
    except KeyError:
        raise KeyError("unknown example %r (known: %s)" % (name, ", ".join(sorted(EXAMPLES))))
    return builder(field=field)


# -- basis changes ------------------------------------------------------------

def change_basis(a, mats, orientation=None):
    """Re-express ``a`` in the basis whose degree-d vectors are the columns of ``mats[d]``."""
    F = a.field
    newvec = [None] * len(a)
    invs = {}
    for d in range(0, a.max_degree + 1):
        basis = a.basis(d)
        if not basis:
            continue
        m = mats.get(d) or Matrix.identity(len(basis), F)
        invs[d] = inverse(m)
        for k, i in enumerate(basis):
            newvec[i] = {basis[j]: m.rows[j][k] for j in range(len(basis)) if m.rows[j][k]}

    def coords(x):
        out = {}
        for i, c in x.items():
            d = a.degrees[i]
            basis = a.basis(d)
            col = a.position[i]
            inv = invs[d]
            for r in range(len(basis)):
                val = inv.rows[r][col]
                if val:
                    out = vadd(out, {basis[r]: val * c})
        return out

    diff = [coords(a.d(x)) for x in newvec]
    mult = {}
    for i, x in enumerate(newvec):
        for j, y in enumerate(newvec):
            if a.truncation is not None and a.degrees[i] + a.degrees[j] > a.truncation:
                continue
            p = coords(a.mul(x, y))
            if p:
                mult[(i, j)] = p
    b = CDGA(a.names, a.degrees, diff, mult, a.unit, F, a.truncation)
    iso = GradedLinearMap(b, a, newvec)
    bor = None
    if orientation is not None:
        bor = Orientation(orientation.degree, {i: orientation(newvec[i]) for i in b.basis(orientation.degree) if orientation(newvec[i])}, b)
    return b, bor, iso


def random_unipotent(rng, dim, field=QQ, spread=2, density=0.5):
    m = Matrix.identity(dim, field)
    for i in range(dim):
        for j in range(i + 1, dim):
            if rng.random() < density:
                m.rows[i][j] = field(rng.randint(-spread, spread))
    # shuffle rows and columns together to avoid a fixed triangular shape
    perm = list(range(dim))
    rng.shuffle(perm)
    return Matrix([[m.rows[perm[i]][perm[j]] for j in range(dim)] for i in range(dim)], dim, field)


# -- random PDGAs -------------------------------------------------------------

def sphere(deg, name, field=QQ):
    if deg % 2:
        a = from_tables(["1", name], [0, deg], field=field)
    else:
        a = from_tables(["1", name], [0, deg], products={(name, name): {}}, field=field)
    return a, orient(a, {name: 1})


def projective(k, name="x", field=QQ):
    names = ["1"] + ([name] + ["%s^%d" % (name, i) for i in range(2, k + 1)])
    degrees = [2 * i for i in range(k + 1)]
    prods = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            if i + j <= k:
                prods[(names[i], names[j])] = {names[i + j]: 1}
    a = from_tables(names, degrees, products=prods, field=field)
    return a, orient(a, {names[-1]: 1})


def product(*factors):
    a, oa = factors[0]
    for b, ob in factors[1:]:
        t, ia, ib = tensor_product(a, b)
        vals = {}
        for i, c in oa.values.items():
            for j, e in ob.values.items():
                x = t.mul(ia.images[i], ib.images[j])
                for k, y in x.items():
                    vals[k] = vals.get(k, t.field.zero) + c * e * y
        a, oa = t, Orientation(oa.degree + ob.degree, {k: x for k, x in vals.items() if x}, t)
    return a, oa


def cores(field=QQ):
    """Connected, simply-connected dPD algebras of degree 5..7."""
    return {
        "S2xS3": lambda: product(sphere(2, "x", field), sphere(3, "y", field)),
        "S3xS3": lambda: product(sphere(3, "x", field), sphere(3, "y", field)),
        "S2xS4": lambda: product(sphere(2, "x", field), sphere(4, "y", field)),
        "CP3": lambda: projective(3, "x", field),
        "S2xS5": lambda: product(sphere(2, "x", field), sphere(5, "y", field)),
        "S2xS2xS3": lambda: product(sphere(2, "x", field), sphere(2, "u", field), sphere(3, "y", field)),
        "V1": lambda: v1(field),
        "V2": lambda: v2(field),
    }


def add_cross_pairs(a, orientation, degrees, rng, field=QQ, spread=2):
    """Adjoin an acyclic piece ``u_i -> du_i`` with products ``u_i u_j = λ_ij t``.

    ``t`` is a top vector with ``Or(t) = 1``; all other products with the new
    vectors vanish, so the result is again a CDGA with the same homology and
    each ``du_i`` is a degenerate cycle whenever some λ_ij involving i is
    nonzero.
    """
    n = orientation.degree
    k, val = next((k, x) for k, x in sorted(orientation.values.items()) if x)
    top = {k: field.one / val}
    names = list(a.names)
    degs = list(a.degrees)
    diff = {a.names[i]: {a.names[j]: c for j, c in a.diff[i].items()} for i in range(len(a))}
    prods = {}
    for (i, j), img in a.mult.items():
        prods[(a.names[i], a.names[j])] = {a.names[t]: c for t, c in img.items()}
    us = []
    for i, p in enumerate(degrees):
        u, du = "u%d" % (i + 1), "du%d" % (i + 1)
        names += [u, du]
        degs += [p, p + 1]
        diff[u] = {du: field.one}
        us.append((u, p))
    lam = {}
    for i, (u1, p1) in enumerate(us):
        for j, (u2, p2) in enumerate(us):
            if j < i or p1 + p2 != n:
                continue
            if i == j and p1 % 2:
                continue
            c = field(rng.choice([x for x in range(-spread, spread + 1) if x]))
            lam[(u1, u2)] = c
            img = {a.names[t]: x * c for t, x in top.items()}
            prods[(u1, u2)] = img
            if i != j:
                s_ = sign(p1 * p2)
                prods[(u2, u1)] = {t: x * s_ for t, x in img.items()}
    order = sorted(range(len(names)), key=lambda i: (degs[i], i))
    names = [names[i] for i in order]
    degs = [degs[i] for i in order]
    b = from_tables(names, degs, diff, prods, field, a.truncation, unit=a.names[a.unit])
    bor = Orientation(n, {b.index[a.names[i]]: x for i, x in orientation.values.items()}, b)
    return b, bor, {"%s*%s" % k: str(v) for k, v in lam.items()}


def _tensor_wz(c, oc, deg_w, T, field):
    lam = build_truncated_free(FreePresentation([("w", deg_w), ("z", deg_w + 1)], {"w": [("z", "1")]}, T, field))
    v, ic, il = tensor_product(c, lam, T)
    vals = {}
    for i, val in oc.values.items():
        for k, x in ic.images[i].items():
            vals[k] = vals.get(k, field.zero) + val * x
    return v, lam, vals


def random_pdga(rng, core=None, deg_w=None, field=QQ, phi_density=0.6, spread=2, basis_change=True, recipe=None):
    """Random oriented PDGA over a dPD core.

    Recipes: ``tensor`` takes core ⊗ truncated Λ(w, z) with orientation
    ``Or_core ∘ p + phi ∘ D``, where phi is a random functional on the
    degree ``n+1`` part of positive word length (so it still vanishes on
    boundaries and agrees with the core on ``V ⊗ 1``); ``ideal`` adjoins
    square-zero acyclic pairs with random cross-pairings; ``both`` does the
    ideal step and then the tensor step.  A random unipotent change of
    basis is applied last.
    """
    table = cores(field)
    name = core or rng.choice(sorted(table))
    recipe = recipe or rng.choice(["tensor", "ideal", "both"])
    c, oc = table[name]()
    n = oc.degree
    T = n + 2
    info = {"core": name, "degree": n, "truncation": T, "recipe": recipe}
    if recipe in ("ideal", "both"):
        count = rng.randint(1, 3)
        degs = []
        for _ in range(count):
            p = rng.randint(2, n - 2)
            degs += [p, n - p] if rng.random() < 0.7 else [p]
        c, oc, lam = add_cross_pairs(c, oc, sorted(degs), rng, field, spread)
        info["crossPairs"] = lam
    if recipe in ("tensor", "both"):
        if deg_w is None:
            deg_w = rng.randint(2, n - 1)
        info["deg_w"] = deg_w
        v, lam, vals = _tensor_wz(c, oc, deg_w, T, field)
        phi = {}
        for k in v.basis(n + 1):
            if v.pairs[k][1] != lam.unit and rng.random() < phi_density:
                phi[k] = field(rng.randint(-spread, spread))
        for k in v.basis(n):
            s = sum((c_ * phi.get(j, field.zero) for j, c_ in v.diff[k].items()), field.zero)
            if s:
                vals[k] = vals.get(k, field.zero) + s
        orientation = Orientation(n, {k: x for k, x in vals.items() if x}, v)
    else:
        v, orientation = c, oc
    if basis_change:
        mats = {d: random_unipotent(rng, v.dim(d), field) for d in range(1, v.max_degree + 1) if v.dim(d)}
        v, orientation, _ = change_basis(v, mats, orientation)
    return v, orientation, info


def random_non_hodge(rng, field=QQ, tries=200, **kw):
    """Rejection-sample :func:`random_pdga` until the twist equation is infeasible."""
    from .algebra import pairing_from_orientation
    from .hodge import h_orthogonalize, solve_twist

    for _ in range(tries):
        v, o, info = random_pdga(rng, field=field, **kw)
        if not solve_twist(h_orthogonalize(v, pairing_from_orientation(v, o))).feasible:
            return v, o, info
    raise RuntimeError("no non-Hodge instance in %d tries" % tries)


# -- random cyclic complexes --------------------------------------------------

def cyclic_forms(v, n):
    """Basis of the space of cyclic pairings of degree n on a complex."""
    F = v.field
    var = {}
    for d in range(0, n + 1):
        for i in v.basis(d):
            for j in v.basis(n - d):
                var[(i, j)] = len(var)
    rows = []
    N = len(var)
    for (i, j), k in var.items():
        di, dj = v.degrees[i], v.degrees[j]
        row = [F.zero] * N
        row[k] = F.one
        row[var[(j, i)]] = row[var[(j, i)]] - sign(di * dj)
        if any(row):
            rows.append(row)
    for d in range(0, n):
        for i in v.basis(d):
            for j in v.basis(n - 1 - d):
                di, dj = d, n - 1 - d
                row = [F.zero] * N
                for t, c in v.diff[i].items():
                    row[var[(t, j)]] = row[var[(t, j)]] + c
                s = sign(1 + di * dj)
                for t, c in v.diff[j].items():
                    row[var[(t, i)]] = row[var[(t, i)]] - s * c
                if any(row):
                    rows.append(row)
    if not rows:
        ker = [[F.one if r == c else F.zero for r in range(N)] for c in range(N)]
    else:
        ker = kernel_basis(Matrix(rows, N, F))
    return var, ker


def random_complex(rng, n, field=QQ, max_piece=2):
    """Random finite complex in degrees 0..n with a random basis."""
    names, degrees, diff = [], [], []
    hdims = {}
    for d in range(0, n // 2 + 1):
        k = rng.randint(0, max_piece) if 0 < d else 1
        hdims[d] = k
        hdims[n - d] = k
    pieces = []
    for d in range(0, n + 1):
        for i in range(hdims.get(d, 0)):
            names.append("h%d_%d" % (d, i))
            degrees.append(d)
            diff.append({})
    for d in range(0, n):
        for i in range(rng.randint(0, max_piece)):
            names.append("c%d_%d" % (d, i))
            degrees.append(d)
            diff.append(None)
            names.append("b%d_%d" % (d + 1, i))
            degrees.append(d + 1)
            diff.append({})
            pieces.append(len(names) - 2)
    for k in pieces:
        diff[k] = {k + 1: field.one}
    order = sorted(range(len(names)), key=lambda i: (degrees[i], names[i]))
    where = {old: new for new, old in enumerate(order)}
    v = Complex(
        [names[i] for i in order],
        [degrees[i] for i in order],
        [{where[t]: c for t, c in diff[i].items()} for i in order],
        field,
    )
    mats = {d: random_unipotent(rng, v.dim(d), field) for d in range(0, v.max_degree + 1) if v.dim(d)}
    return _complex_change(v, mats)


def _complex_change(v, mats):
    F = v.field
    newvec = [None] * len(v)
    invs = {}
    for d in range(0, v.max_degree + 1):
        basis = v.basis(d)
        if not basis:
            continue
        m = mats[d]
        invs[d] = inverse(m)
        for k, i in enumerate(basis):
            newvec[i] = {basis[j]: m.rows[j][k] for j in range(len(basis)) if m.rows[j][k]}
    diff = []
    for x in newvec:
        img = v.d(x)
        out = {}
        for i, c in img.items():
            d = v.degrees[i]
            basis = v.basis(d)
            for r in range(len(basis)):
                val = invs[d].rows[r][v.position[i]]
                if val:
                    out = vadd(out, {basis[r]: val * c})
        diff.append(out)
    return Complex(["x%d_%d" % (v.degrees[i], v.position[i]) for i in range(len(v))], v.degrees, diff, F)


def random_cyclic_complex(rng, n=None, field=QQ, sparsity=None):
    """A random complex with a random element of its space of cyclic pairings."""
    n = rng.randint(2, 6) if n is None else n
    v = random_complex(rng, n, field)
    var, ker = cyclic_forms(v, n)
    q = rng.choice([0.3, 0.6, 0.85]) if sparsity is None else sparsity
    vals = [field.zero] * len(var)
    for k in ker:
        if rng.random() < q:
            continue
        c = field(rng.choice([-2, -1, 1, 2]))
        vals = [x + c * y for x, y in zip(vals, k)]
    blocks = {}
    for d in range(0, n + 1):
        rows = [[vals[var[(i, j)]] for j in v.basis(n - d)] for i in v.basis(d)]
        blocks[d] = Matrix(rows, v.dim(n - d), field)
    return v, CyclicPairing(n, blocks, v)
