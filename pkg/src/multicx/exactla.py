"""Exact sparse linear algebra over the rationals.

Everything downstream (graded maps, spectral pages, gauge series) reduces to
ranks, kernels, images, complements and induced maps on subquotients computed
here.  All arithmetic uses `fractions.Fraction`; there is no floating point
anywhere in the package.  Basis selection follows a leftmost-pivot convention,
so every output is reproducible byte for byte.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotContained, NotWellDefined, ShapeMismatch

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(x) -> Fraction:
    """Coerce ints, strings like '3/7', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError("not an exact rational: %r" % (x,))


class Matrix:
    """Sparse rational matrix; immutable by convention after construction.

    Entries are stored as {(row, col): Fraction} with no explicit zeros.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ShapeMismatch("negative matrix shape %dx%d" % (rows, cols))
        self.rows = rows
        self.cols = cols
        ent = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for item in items:
                if isinstance(entries, dict):
                    (r, c), v = item
                else:
                    r, c, v = item
                v = rat(v)
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ShapeMismatch("entry (%d,%d) outside %dx%d" % (r, c, rows, cols))
                if v != 0:
                    prev = ent.get((r, c), ZERO)
                    tot = prev + v
                    if tot:
                        ent[(r, c)] = tot
                    elif (r, c) in ent:
                        del ent[(r, c)]
        self.entries = ent

    @staticmethod
    def zero(rows: int, cols: int) -> "Matrix":
        return Matrix(rows, cols)

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, [(i, i, ONE) for i in range(n)])

    @staticmethod
    def from_rows(data) -> "Matrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ent = []
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ShapeMismatch("ragged rows")
            for j, v in enumerate(row):
                ent.append((i, j, rat(v)))
        return Matrix(rows, cols, ent)

    @staticmethod
    def column(values) -> "Matrix":
        return Matrix(len(values), 1, [(i, 0, rat(v)) for i, v in enumerate(values)])

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self):
        return "Matrix(%d, %d, %d entries)" % (self.rows, self.cols, len(self.entries))

    def is_zero(self) -> bool:
        return not self.entries

    def get(self, r: int, c: int) -> Fraction:
        return self.entries.get((r, c), ZERO)

    def to_rows(self):
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def add(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("add %dx%d to %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        ent = dict(self.entries)
        for key, v in other.entries.items():
            tot = ent.get(key, ZERO) + v
            if tot:
                ent[key] = tot
            elif key in ent:
                del ent[key]
        m = Matrix(self.rows, self.cols)
        m.entries.update(ent)
        return m

    def scale(self, a) -> "Matrix":
        a = rat(a)
        m = Matrix(self.rows, self.cols)
        if a:
            m.entries.update({k: a * v for k, v in self.entries.items()})
        return m

    def neg(self) -> "Matrix":
        return self.scale(-1)

    def sub(self, other: "Matrix") -> "Matrix":
        return self.add(other.neg())

    def mul(self, other: "Matrix") -> "Matrix":
        """Matrix product self @ other."""
        if self.cols != other.rows:
            raise ShapeMismatch("mul %dx%d by %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        by_row = {}
        for (j, k), v in other.entries.items():
            by_row.setdefault(j, []).append((k, v))
        acc = {}
        for (i, j), a in self.entries.items():
            hits = by_row.get(j)
            if not hits:
                continue
            for k, b in hits:
                key = (i, k)
                tot = acc.get(key, ZERO) + a * b
                if tot:
                    acc[key] = tot
                elif key in acc:
                    del acc[key]
        m = Matrix(self.rows, other.cols)
        m.entries.update(acc)
        return m

    def transpose(self) -> "Matrix":
        m = Matrix(self.cols, self.rows)
        m.entries.update({(c, r): v for (r, c), v in self.entries.items()})
        return m

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise ShapeMismatch("hstack row mismatch")
        m = Matrix(self.rows, self.cols + other.cols)
        m.entries.update(self.entries)
        for (r, c), v in other.entries.items():
            m.entries[(r, self.cols + c)] = v
        return m

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise ShapeMismatch("vstack col mismatch")
        m = Matrix(self.rows + other.rows, self.cols)
        m.entries.update(self.entries)
        for (r, c), v in other.entries.items():
            m.entries[(self.rows + r, c)] = v
        return m

    def col(self, j: int) -> "Matrix":
        m = Matrix(self.rows, 1)
        for (r, c), v in self.entries.items():
            if c == j:
                m.entries[(r, 0)] = v
        return m

    def select_columns(self, js) -> "Matrix":
        pos = {j: k for k, j in enumerate(js)}
        m = Matrix(self.rows, len(js))
        for (r, c), v in self.entries.items():
            k = pos.get(c)
            if k is not None:
                m.entries[(r, k)] = v
        return m

    def select_rows(self, rs) -> "Matrix":
        pos = {r: k for k, r in enumerate(rs)}
        m = Matrix(len(rs), self.cols)
        for (r, c), v in self.entries.items():
            k = pos.get(r)
            if k is not None:
                m.entries[(k, c)] = v
        return m


def _rref(m: Matrix):
    """Reduced row echelon form.

    Returns (pivot_cols, rows) where rows is a list of {col: value} dicts in
    echelon order.  Pivot columns are scanned left to right; among candidate
    pivot rows the sparsest (then lowest-index) is chosen, which does not
    affect the result (RREF is unique) but keeps intermediate fill-in low.
    """
    rows = [dict() for _ in range(m.rows)]
    for (r, c), v in m.entries.items():
        rows[r][c] = v
    rows = [r for r in rows if r]
    done = []
    pivots = []
    for col in range(m.cols):
        cand = [i for i, r in enumerate(rows) if col in r]
        if not cand:
            continue
        cand.sort(key=lambda i: (len(rows[i]), i))
        i = cand[0]
        piv = rows.pop(i)
        inv = ONE / piv[col]
        piv = {c: v * inv for c, v in piv.items()}
        for other_set in (rows, done):
            for k, r in enumerate(other_set):
                f = r.get(col)
                if f is None:
                    continue
                new = dict(r)
                for c, v in piv.items():
                    t = new.get(c, ZERO) - f * v
                    if t:
                        new[c] = t
                    elif c in new:
                        del new[c]
                other_set[k] = new
        rows = [r for r in rows if r]
        done.append(piv)
        pivots.append(col)
    return pivots, done


def rank(m: Matrix) -> int:
    pivots, _ = _rref(m)
    return len(pivots)


class Subspace:
    """A subspace of Q^n given by a basis matrix with independent columns."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis: Matrix):
        if basis.rows != ambient_dim:
            raise ShapeMismatch("basis rows != ambient dim")
        if basis.cols and rank(basis) != basis.cols:
            raise ShapeMismatch("basis columns are dependent")
        self.ambient_dim = ambient_dim
        self.basis = basis

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, Matrix(ambient_dim, 0))

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, Matrix.identity(ambient_dim))

    @staticmethod
    def spanned_by(ambient_dim: int, vectors: Matrix) -> "Subspace":
        """Span of arbitrary column vectors; dependent columns are dropped."""
        _, img = kernel_image(vectors)
        return Subspace(ambient_dim, img.basis)

    @property
    def dim(self) -> int:
        return self.basis.cols

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim
                and self.dim == other.dim and self.contains(other))

    def __repr__(self):
        return "Subspace(dim %d of Q^%d)" % (self.dim, self.ambient_dim)

    def contains_vector(self, v: Matrix) -> bool:
        return solve(self.basis, v) is not None

    def contains(self, other: "Subspace") -> bool:
        return solve(self.basis, other.basis) is not None

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ShapeMismatch("subspace sum in different ambients")
        return Subspace.spanned_by(self.ambient_dim, self.basis.hstack(other.basis))


def kernel_image(m: Matrix):
    """Kernel and image (column space) of m, with canonical bases.

    The kernel basis comes from the unique RREF (one vector per free column,
    free columns ascending); the image basis is the original columns at the
    pivot positions, so dim ker + dim im = cols always.
    """
    pivots, rows = _rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    ker = Matrix(m.cols, len(free))
    for k, fc in enumerate(free):
        ker.entries[(fc, k)] = ONE
        for prow, pcol in enumerate(pivots):
            v = rows[prow].get(fc)
            if v:
                ker.entries[(pcol, k)] = -v
    image = m.select_columns(pivots)
    return Subspace(m.cols, ker), Subspace(m.rows, image)


def solve(a: Matrix, b: Matrix):
    """Solve a @ X = b columnwise; returns X or None when unsolvable.

    Free variables are set to zero, so the solution is deterministic.
    """
    if a.rows != b.rows:
        raise ShapeMismatch("solve with mismatched rows")
    aug = a.hstack(b)
    pivots, rows = _rref(aug)
    for p, prow in zip(pivots, rows):
        if p >= a.cols:
            return None
    x = Matrix(a.cols, b.cols)
    for prow, pcol in enumerate(pivots):
        for c, v in rows[prow].items():
            if c >= a.cols and v:
                x.entries[(pcol, c - a.cols)] = v
    return x


def complement(sub: Subspace, ambient: Subspace) -> Subspace:
    """A complement of `sub` inside `ambient`, greedy over ambient's basis.

    Scans ambient basis columns in order and keeps those that enlarge the
    span, so the choice is deterministic given the input ordering.
    """
    if sub.ambient_dim != ambient.ambient_dim:
        raise ShapeMismatch("complement in a different ambient space")
    if not ambient.contains(sub):
        raise NotContained("subspace not inside the ambient subspace")
    current = sub.basis
    r = current.cols
    chosen = []
    for j in range(ambient.basis.cols):
        if r == ambient.dim:
            break
        cand = current.hstack(ambient.basis.col(j))
        if rank(cand) > r:
            current = cand
            r += 1
            chosen.append(j)
    return Subspace(ambient.ambient_dim, ambient.basis.select_columns(chosen))


def induced_subquotient_map(m: Matrix, src, dst) -> Matrix:
    """Matrix of the map induced by m between subquotients.

    `src` and `dst` are (numerator, denominator) Subspace pairs with the
    denominator contained in the numerator.  Coordinates on a subquotient are
    the coefficients on the greedy complement of the denominator inside the
    numerator, so they are deterministic.  Raises NotWellDefined when m fails
    to respect either subquotient, which signals a logic error upstream.
    """
    src_num, src_den = src
    dst_num, dst_den = dst
    if not src_num.contains(src_den):
        raise NotContained("source denominator not inside numerator")
    if not dst_num.contains(dst_den):
        raise NotContained("target denominator not inside numerator")
    if m.cols != src_num.ambient_dim or m.rows != dst_num.ambient_dim:
        raise ShapeMismatch("map shape does not match the ambient spaces")
    if src_den.dim:
        if solve(dst_den.basis, m.mul(src_den.basis)) is None:
            raise NotWellDefined("denominator is not carried into the target denominator")
    src_rep = complement(src_den, src_num)
    dst_rep = complement(dst_den, dst_num)
    frame = dst_den.basis.hstack(dst_rep.basis)
    if src_rep.dim == 0:
        return Matrix(dst_rep.dim, 0)
    coords = solve(frame, m.mul(src_rep.basis))
    if coords is None:
        raise NotWellDefined("numerator is not carried into the target numerator")
    return coords.select_rows(range(dst_den.dim, dst_den.dim + dst_rep.dim))
