"""Small subalgebras: the closure of H under ∧, D and the homotopy h.

Two routes compute the same span.  The closure route saturates a
worklist; the tree route evaluates colored binary trees (white edge =
identity, black edge = h) whose leaves are harmonic vectors.  Values of
degree above the cap are treated as zero by both routes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .algebra import CDGA, GradedLinearMap, vadd
from .linalg import Matrix, _Echelon, reduced_row_echelon, solve_linear

WHITE, BLACK = "w", "b"


@dataclass(frozen=True)
class ColoredTree:
    """``edge`` colors the edge above this vertex; a leaf has ``children=None``."""

    edge: str
    children: tuple = None
    leaf: int = 0

    @property
    def is_leaf(self):
        return self.children is None

    def leaves(self):
        if self.is_leaf:
            return 1
        return self.children[0].leaves() + self.children[1].leaves()

    def black_edges(self):
        own = 1 if self.edge == BLACK else 0
        if self.is_leaf:
            return own
        return own + self.children[0].black_edges() + self.children[1].black_edges()

    def serialize(self, labels=None):
        if self.is_leaf:
            lab = labels[self.leaf - 1] if labels else str(self.leaf)
            return "%s[%s]" % (self.edge, lab)
        a, b = self.children
        return "%s(%s %s)" % (self.edge, a.serialize(labels), b.serialize(labels))

    __str__ = serialize


def parse_tree(text):
    """Inverse of :meth:`ColoredTree.serialize` for numeric leaf labels."""
    pos = 0

    def node():
        nonlocal pos
        color = text[pos]
        if color not in (WHITE, BLACK):
            raise ValueError("bad edge color at %d in %r" % (pos, text))
        pos += 1
        if text[pos] == "[":
            end = text.index("]", pos)
            leaf = int(text[pos + 1:end])
            pos = end + 1
            return ColoredTree(color, None, leaf)
        if text[pos] != "(":
            raise ValueError("expected '(' at %d in %r" % (pos, text))
        pos += 1
        left = node()
        if text[pos] != " ":
            raise ValueError("expected ' ' at %d in %r" % (pos, text))
        pos += 1
        right = node()
        if text[pos] != ")":
            raise ValueError("expected ')' at %d in %r" % (pos, text))
        pos += 1
        return ColoredTree(color, (left, right))

    t = node()
    if pos != len(text):
        raise ValueError("trailing characters in %r" % text)
    return t


@lru_cache(maxsize=None)
def _shapes(lo, hi):
    """Uncolored shapes on leaves lo..hi as nested tuples."""
    if lo == hi:
        return (lo,)
    out = []
    for mid in range(lo, hi):
        for a in _shapes(lo, mid):
            for b in _shapes(mid + 1, hi):
                out.append((a, b))
    return tuple(out)


def _colorings(shape, root=True):
    if isinstance(shape, int):
        # a black leaf edge evaluates to h(H) = 0
        yield ColoredTree(WHITE, None, shape)
        return
    for left in _colorings(shape[0], False):
        for right in _colorings(shape[1], False):
            for c in (WHITE, BLACK):
                yield ColoredTree(c, (left, right))


def enumerate_trees(l, max_out_degree=None, leaf_degrees=None):
    """Every shape and coloring with l ordered leaves, white leaf edges.

    With ``leaf_degrees`` given, trees whose smallest possible value
    degree (``l * min(leaf_degrees) - #black``) exceeds ``max_out_degree``
    are dropped.
    """
    if l < 1:
        raise ValueError("need at least one leaf")
    lo = min(leaf_degrees) if leaf_degrees else None
    for shape in _shapes(1, l):
        for t in _colorings(shape):
            if max_out_degree is not None and lo is not None:
                if l * lo - t.black_edges() > max_out_degree:
                    continue
            yield t


def eval_tree(a, h, t, leaves):
    """Evaluate ``t`` with leaf i labelled ``leaves[i-1]``; h is a GradedLinearMap."""
    if t.leaves() != len(leaves):
        raise ValueError("tree has %d leaves, got %d labels" % (t.leaves(), len(leaves)))

    def ev(node):
        if node.is_leaf:
            val = leaves[node.leaf - 1]
        else:
            val = a.mul(ev(node.children[0]), ev(node.children[1]))
        return h(val) if node.edge == BLACK else val

    return ev(t)


# -- span bookkeeping ---------------------------------------------------------

class GradedSpan:
    """Per-degree echelon bases of a subspace of an algebra."""

    def __init__(self, space, cap):
        self.space = space
        self.cap = cap
        self.ech = {}
        self.gens = {}

    def add(self, vec):
        """Add the homogeneous components of vec; returns the new ones."""
        sp = self.space
        parts = {}
        for i, c in vec.items():
            parts.setdefault(sp.degrees[i], {})[i] = c
        new = []
        for d, part in sorted(parts.items()):
            if d > self.cap:
                continue
            e = self.ech.get(d)
            if e is None:
                e = self.ech[d] = _Echelon(sp.dim(d), sp.field)
            if e.add(sp.to_dense(part, d)):
                self.gens.setdefault(d, []).append(part)
                new.append(part)
        return new

    def contains(self, vec):
        sp = self.space
        parts = {}
        for i, c in vec.items():
            parts.setdefault(sp.degrees[i], {})[i] = c
        for d, part in parts.items():
            if d > self.cap:
                continue
            e = self.ech.get(d)
            if e is None or not e.contains(sp.to_dense(part, d)):
                return False
        return True

    def dim(self, d):
        e = self.ech.get(d)
        return e.rank if e else 0

    def dims(self):
        return [self.dim(d) for d in range(0, self.cap + 1)]

    def basis(self, d):
        """Reduced echelon basis rows (sparse), sorted by pivot."""
        e = self.ech.get(d)
        if not e:
            return []
        return [self.space.to_sparse(e.rows[c], d) for c in sorted(e.rows)]

    def degrees(self):
        return sorted(d for d in self.ech if self.ech[d].rank)

    def same_as(self, other):
        return all(self.dim(d) == other.dim(d) for d in range(0, self.cap + 1)) and all(
            other.contains(g) for gs in self.gens.values() for g in gs
        )


def _cut(space, vec, cap):
    return {i: c for i, c in vec.items() if space.degrees[i] <= cap}


def _over(space, vec, cap):
    return any(space.degrees[i] > cap for i in vec)


class SmallSubalgebra:
    def __init__(self, ambient, span, cap, cap_hit, guaranteed):
        self.ambient = ambient
        self.span = span
        self.cap = cap
        self.cap_hit = cap_hit
        self.guaranteed = guaranteed

    def dims(self):
        return self.span.dims()


def closure_span(a, hd, h, cap):
    """Worklist closure of H (plus the unit) under D, h and products."""
    span = GradedSpan(a, cap)
    hit = set()
    queue = []
    for v in [a.one()] + [x for d in sorted(hd.H) for x in hd.H[d]]:
        queue.extend(span.add(_cut(a, v, cap)))
    done = []
    while queue:
        x = queue.pop(0)
        cands = [a.d(x), h(x)]
        for y in done + [x]:
            cands.append(a.mul(x, y))
        done.append(x)
        for c in cands:
            if _over(a, c, cap):
                hit.update(a.degrees[i] for i in c if a.degrees[i] > cap)
            queue.extend(span.add(_cut(a, c, cap)))
    return span, sorted(hit)


def _products(a, xs, ys, cap):
    out = []
    for x in xs:
        for y in ys:
            p = _cut(a, a.mul(x, y), cap)
            if p:
                out.append(p)
    return out


def _reduce(a, vecs):
    """Echelon basis (sparse, per-degree) of the span of homogeneous vecs."""
    by = {}
    for v in vecs:
        if v:
            d = a.degrees[next(iter(v))]
            by.setdefault(d, []).append(v)
    out = []
    for d in sorted(by):
        rk, _, red = reduced_row_echelon(Matrix([a.to_dense(v, d) for v in by[d]], a.dim(d), a.field))
        out.extend(a.to_sparse(red.rows[i], d) for i in range(rk))
    return out


def tree_span(a, hd, h, cap, max_leaves=None, record=None, dump=None):
    """Span of all tree evaluations with harmonic, non-unit leaves.

    Evaluation is span-valued: a subtree with l leaves stands for the span
    of its values over all choices of leaves, which is exact by
    multilinearity.  ``record`` (a dict) receives, per leaf count, the
    smallest degree of a nonzero value; ``dump`` (a list) receives one
    entry per distinct evaluation.
    """
    unit_deg = {d: x for d, x in hd.H.items()}
    leaves = []
    for d in sorted(unit_deg):
        for x in unit_deg[d]:
            if d == 0:
                continue
            leaves.append(_cut(a, x, cap))
    leaves = _reduce(a, [x for x in leaves if x])
    span = GradedSpan(a, cap)
    span.add(a.one())
    for d in sorted(hd.H):
        if d == 0:
            for x in hd.H[d]:
                span.add(x)
    if not leaves:
        return span
    min_leaf = min(a.degrees[next(iter(x))] for x in leaves)
    if max_leaves is None:
        max_leaves = cap if min_leaf <= 1 else max(1, cap - 1)
    # values[l] = list of (tree-with-numeric-leaves, span basis) for subtrees
    # whose top edge color is already applied
    values = {1: [(ColoredTree(WHITE, None, 1), leaves)]}
    for x in leaves:
        span.add(x)
    if record is not None:
        record[1] = min_leaf
    for l in range(2, max_leaves + 1):
        cur = []
        seen = set()
        for k in range(1, l):
            for ta, va in values.get(k, []):
                for tb, vb in values.get(l - k, []):
                    prod = _reduce(a, _products(a, va, vb, cap))
                    if not prod:
                        continue
                    for color in (WHITE, BLACK):
                        val = prod if color == WHITE else _reduce(a, [h(x) for x in prod])
                        if not val:
                            continue
                        key = tuple(tuple(sorted((i, str(c)) for i, c in x.items())) for x in val)
                        if key in seen:
                            continue
                        seen.add(key)
                        t = ColoredTree(color, (_shift(ta, 0), _shift(tb, k)))
                        cur.append((t, val))
                        for x in val:
                            span.add(x)
                        if dump is not None:
                            dump.append({"tree": t.serialize(), "leaves": l, "degrees": sorted({a.degrees[next(iter(x))] for x in val}), "dim": len(val)})
                        if record is not None:
                            md = min(a.degrees[next(iter(x))] for x in val)
                            record[l] = min(record.get(l, md), md)
        if not cur:
            break
        values[l] = cur
    return span


def _shift(t, k):
    if t.is_leaf:
        return ColoredTree(t.edge, None, t.leaf + k)
    return ColoredTree(t.edge, (_shift(t.children[0], k), _shift(t.children[1], k)))


def small_subalgebra(a, hd, h, cap=None, check_trees=False):
    """Closure of H under ∧, D, h within degrees <= cap."""
    n = hd.degree
    cap = n + 2 if cap is None else cap
    span, hit = closure_span(a, hd, h, cap)
    guaranteed = len(hd.H.get(0, [])) == 1 and not hd.H.get(1)
    s = SmallSubalgebra(a, span, cap, hit, guaranteed)
    if check_trees:
        ts = tree_span(a, hd, h, cap)
        if not ts.same_as(span) or not span.same_as(ts):
            raise AssertionError("tree span and closure span differ")
    return s


def verify_closure(a, span, hd, h):
    """Report on D(S) ⊂ S, h(S) ⊂ S, S∧S ⊂ S (within cap), H ⊂ S and S = H ⊕ DS ⊕ h(S)."""
    cap = span.cap
    rep = []
    basis = {d: span.basis(d) for d in span.degrees()}
    for d, vecs in basis.items():
        for x in vecs:
            if not span.contains(a.d(x)):
                rep.append("D-closure fails in degree %d" % d)
            if not span.contains(h(x)):
                rep.append("h-closure fails in degree %d" % d)
    for d1, v1 in basis.items():
        for d2, v2 in basis.items():
            if d2 < d1 or d1 + d2 > cap:
                continue
            for x in v1:
                for y in v2:
                    if not span.contains(a.mul(x, y)):
                        rep.append("product closure fails in degrees (%d,%d)" % (d1, d2))
                        break
    for d, vecs in hd.H.items():
        if d > cap:
            continue
        for x in vecs:
            if not span.contains(x):
                rep.append("harmonic vector missing in degree %d" % d)
    for d in range(0, cap + 1):
        dim = span.dim(d)
        hdim = len([x for x in hd.H.get(d, [])])
        ds = [a.d(x) for x in basis.get(d - 1, [])]
        hs = [h(x) for x in basis.get(d + 1, [])]
        vecs = [x for x in ds + hs if x]
        rank = 0
        if vecs:
            rank = reduced_row_echelon(Matrix([a.to_dense(x, d) for x in vecs], a.dim(d), a.field))[0]
        if hdim + rank != dim:
            rep.append("H + DS + hS does not exhaust degree %d" % d)
    return sorted(set(rep))


def as_cdga(a, span, orientation=None, name_prefix=None):
    """The subalgebra as a CDGA, with its inclusion map.

    Basis vectors are the reduced echelon rows; each is named after the
    ambient basis vector at its pivot.
    """
    from .algebra import Orientation

    F = a.field
    vecs, names, degrees, pivots = [], [], [], []
    for d in span.degrees():
        e = span.ech[d]
        for c in sorted(e.rows):
            row = e.rows[c]
            vecs.append(a.to_sparse(row, d))
            piv = a.basis(d)[c]
            nm = a.names[piv]
            if any(x for k, x in enumerate(row) if k != c):
                nm = nm + "~"
            names.append(nm)
            degrees.append(d)
            pivots.append(piv)
    index = {p: k for k, p in enumerate(pivots)}

    def coords(x):
        out = {}
        for i, c in x.items():
            k = index.get(i)
            if k is not None:
                out[k] = c
        back = {}
        for k, c in out.items():
            back = vadd(back, vecs[k], c)
        if _cut(a, back, span.cap) != _cut(a, x, span.cap):
            raise AssertionError("vector leaves the subalgebra")
        return out

    diff = [coords(_cut(a, a.d(x), span.cap)) for x in vecs]
    mult = {}
    for i, x in enumerate(vecs):
        for j, y in enumerate(vecs):
            if degrees[i] + degrees[j] > span.cap:
                continue
            p = coords(_cut(a, a.mul(x, y), span.cap))
            if p:
                mult[(i, j)] = p
    unit = index[a.unit]
    trunc = a.truncation if a.truncation is not None and a.truncation <= span.cap else None
    if trunc is None and span.cap < a.max_degree:
        trunc = span.cap
    s = CDGA(names, degrees, diff, mult, unit, F, trunc)
    inc = GradedLinearMap(s, a, vecs)
    sor = None
    if orientation is not None:
        vals = {i: orientation(vecs[i]) for i in s.basis(orientation.degree)}
        if any(vals.values()):
            sor = Orientation(orientation.degree, vals, s)
    return s, inc, sor
