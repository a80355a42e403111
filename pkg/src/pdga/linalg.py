"""Exact dense linear algebra with deterministic pivoting.

Vectors are plain lists of field elements; a :class:`Matrix` keeps its
shape explicitly so that empty row sets still know their column count.
Pivots are chosen leftmost column first, topmost usable row first, which
makes every basis choice reproducible.
"""

from __future__ import annotations

from .field import QQ


class LinearAlgebraError(ValueError):
    pass


class Matrix:
    __slots__ = ("rows", "nrows", "ncols", "field")

    def __init__(self, rows, ncols=None, field=QQ):
        kind = type(field.zero)
        rows = [[x if type(x) is kind else field(x) for x in r] for r in rows]
        if ncols is None:
            if not rows:
                raise LinearAlgebraError("ncols required for a matrix without rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise LinearAlgebraError("ragged matrix: row of length %d, expected %d" % (len(r), ncols))
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols
        self.field = field

    @classmethod
    def zeros(cls, nrows, ncols, field=QQ):
        z = field.zero
        return cls([[z] * ncols for _ in range(nrows)], ncols, field)

    @classmethod
    def identity(cls, n, field=QQ):
        m = cls.zeros(n, n, field)
        for i in range(n):
            m.rows[i][i] = field.one
        return m

    @classmethod
    def from_columns(cls, cols, nrows, field=QQ):
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols), field)

    def columns(self):
        return [[r[j] for r in self.rows] for j in range(self.ncols)]

    def transpose(self):
        return Matrix(self.columns(), self.nrows, self.field)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and all(a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))
        )

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise LinearAlgebraError("shape mismatch %dx%d @ %dx%d" % (self.nrows, self.ncols, other.nrows, other.ncols))
            cols = other.columns()
            return Matrix([[_dot(r, c, self.field) for c in cols] for r in self.rows], other.ncols, self.field)
        if len(other) != self.ncols:
            raise LinearAlgebraError("shape mismatch %dx%d @ vector of length %d" % (self.nrows, self.ncols, len(other)))
        return [_dot(r, other, self.field) for r in self.rows]

    def is_zero(self):
        return all(not x for r in self.rows for x in r)

    def rref(self):
        return reduced_row_echelon(self)

    def rank(self):
        return reduced_row_echelon(self)[0]

    def kernel(self):
        return kernel_basis(self)

    def __repr__(self):
        return "Matrix(%dx%d, %s)" % (self.nrows, self.ncols, [[str(x) for x in r] for r in self.rows])


def _dot(u, v, field):
    s = field.zero
    for a, b in zip(u, v):
        if a and b:
            s = s + a * b
    return s


def reduced_row_echelon(m):
    """Return ``(rank, pivot_columns, reduced)`` for ``m``."""
    rows = [list(r) for r in m.rows]
    pivots = []
    r = 0
    for c in range(m.ncols):
        if r == len(rows):
            break
        p = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                p = i
                break
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pr = rows[r]
        inv = 1 / pr[c]
        if pr[c] != 1:
            pr = [x * inv for x in pr]
            rows[r] = pr
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    ri = rows[i]
                    rows[i] = [a - f * b if b else a for a, b in zip(ri, pr)]
        pivots.append(c)
        r += 1
    return len(pivots), pivots, Matrix(rows, m.ncols, m.field)


def kernel_basis(m):
    """Basis of ker(m): one vector per free column, that column set to 1."""
    rank, pivots, red = reduced_row_echelon(m)
    field = m.field
    pivset = set(pivots)
    basis = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        v = [field.zero] * m.ncols
        v[f] = field.one
        for i, p in enumerate(pivots):
            v[p] = -red.rows[i][f]
        basis.append(v)
    return basis


def solve_linear(a, b):
    """Particular solution of ``a x = b`` with free variables 0, or None."""
    if len(b) != a.nrows:
        raise LinearAlgebraError("right-hand side has length %d, expected %d" % (len(b), a.nrows))
    aug = Matrix([list(r) + [bi] for r, bi in zip(a.rows, b)], a.ncols + 1, a.field)
    rank, pivots, red = reduced_row_echelon(aug)
    if pivots and pivots[-1] == a.ncols:
        return None
    x = [a.field.zero] * a.ncols
    for i, p in enumerate(pivots):
        x[p] = red.rows[i][a.ncols]
    return x


def inconsistency_certificate(a, b):
    """A vector y with ``y a = 0`` and ``y . b != 0`` when ``a x = b`` is unsolvable."""
    for y in kernel_basis(a.transpose()):
        if _dot(y, b, a.field):
            return y
    return None


def rank_of(vectors, dim, field=QQ):
    if not vectors:
        return 0
    return reduced_row_echelon(Matrix(vectors, dim, field))[0]


def extend_basis(sub, candidates, dim, field=QQ):
    """Indices of ``candidates`` kept when scanning in order, keeping each
    vector independent of ``sub`` and of the candidates kept so far."""
    kept = []
    basis = _Echelon(dim, field)
    for v in sub:
        if not basis.add(v):
            raise LinearAlgebraError("sub is linearly dependent")
    for i, v in enumerate(candidates):
        if basis.add(v):
            kept.append(i)
            if basis.rank == dim:
                break
    return kept


def complement_basis(sub, dim, field=QQ):
    """Standard basis vectors extending ``sub`` to a basis of ``field^dim``."""
    std = []
    for i in range(dim):
        e = [field.zero] * dim
        e[i] = field.one
        std.append(e)
    return [std[i] for i in extend_basis(sub, std, dim, field)]


def complement_indices(sub, dim, field=QQ):
    std = []
    for i in range(dim):
        e = [field.zero] * dim
        e[i] = field.one
        std.append(e)
    return extend_basis(sub, std, dim, field)


def inverse(m):
    if m.nrows != m.ncols:
        raise LinearAlgebraError("inverse of a non-square matrix")
    n = m.nrows
    field = m.field
    aug = Matrix([list(r) + [field.one if i == j else field.zero for j in range(n)] for i, r in enumerate(m.rows)], 2 * n, field)
    rank, pivots, red = reduced_row_echelon(aug)
    if pivots[:n] != list(range(n)):
        raise LinearAlgebraError("matrix is singular")
    return Matrix([r[n:] for r in red.rows], n, field)


class _Echelon:
    """Incremental row-echelon basis used for independence tests."""

    def __init__(self, dim, field):
        self.dim = dim
        self.field = field
        self.rows = {}  # pivot column -> normalized row
        self.rank = 0

    def reduce(self, v):
        v = list(v)
        for c in sorted(self.rows):
            f = v[c]
            if f:
                r = self.rows[c]
                v = [a - f * b if b else a for a, b in zip(v, r)]
        return v

    def add(self, v):
        v = self.reduce(v)
        for c, x in enumerate(v):
            if x:
                inv = 1 / x
                v = [y * inv for y in v]
                for k, r in list(self.rows.items()):
                    f = r[c]
                    if f:
                        self.rows[k] = [a - f * b if b else a for a, b in zip(r, v)]
                self.rows[c] = v
                self.rank += 1
                return True
        return False

    def contains(self, v):
        return not any(self.reduce(v))
