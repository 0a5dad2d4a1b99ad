"""Exact rational linear algebra kernel.

Every cohomology, rank and solving operation in the library funnels through
this module.  Scalars are :class:`fractions.Fraction` (arbitrary precision,
always in lowest terms, positive denominator), so results are exact and
reproducible.  Matrices are stored sparsely; elimination falls back to dense
rows below 64 columns where sparse bookkeeping would only add overhead.

Determinism rules used throughout:

* pivot selection: smallest column index first, then the candidate entry with
  the smallest ``numerator * denominator`` bit length, ties broken by row
  order;
* every returned basis is normalised (leading coefficient 1) and sorted by
  the index of its first nonzero coordinate, then lexicographically.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import InputError

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

DENSE_COLUMN_LIMIT = 64

Vector = tuple[Fraction, ...]


def rat(x) -> Fraction:
    """Coerce ints, strings like ``"2/3"`` and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise InputError(f"cannot interpret {x!r} as a rational number")


def format_rat(x: Fraction) -> str:
    """Render a rational as ``p`` or ``p/q`` (never decimal)."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------

def vector(entries: Iterable) -> Vector:
    return tuple(rat(e) for e in entries)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def vec_add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_scale(c: Fraction, a: Vector) -> Vector:
    return tuple(c * x for x in a)


def vec_is_zero(a: Vector) -> bool:
    return all(x == 0 for x in a)


def dot(a: Vector, b: Vector) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), ZERO)


def concat(*vs: Vector) -> Vector:
    out: list[Fraction] = []
    for v in vs:
        out.extend(v)
    return tuple(out)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

class QMatrix:
    """Immutable sparse matrix over the rationals.

    ``entries`` maps ``(row, col)`` to a nonzero Fraction; zeros are never
    stored.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[dict] = None):
        if rows < 0 or cols < 0:
            raise InputError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        clean: dict[tuple[int, int], Fraction] = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise InputError(f"entry index ({r},{c}) outside {rows}x{cols}")
                fv = rat(v)
                if fv != 0:
                    clean[(r, c)] = fv
        self.entries = clean

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, data: Sequence[Sequence], cols: Optional[int] = None) -> "QMatrix":
        nrows = len(data)
        if cols is None:
            cols = len(data[0]) if nrows else 0
        entries = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise InputError("ragged rows in matrix literal")
            for j, v in enumerate(row):
                fv = rat(v)
                if fv != 0:
                    entries[(i, j)] = fv
        return cls(nrows, cols, entries)

    @classmethod
    def from_cols(cls, cols_data: Sequence[Vector], rows: int) -> "QMatrix":
        entries = {}
        for j, col in enumerate(cols_data):
            if len(col) != rows:
                raise InputError("column length mismatch")
            for i, v in enumerate(col):
                if v != 0:
                    entries[(i, j)] = rat(v)
        return cls(rows, len(cols_data), entries)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "QMatrix":
        return cls(rows, cols, {})

    # -- access -------------------------------------------------------
    def entry(self, r: int, c: int) -> Fraction:
        return self.entries.get((r, c), ZERO)

    def row(self, r: int) -> Vector:
        return tuple(self.entries.get((r, c), ZERO) for c in range(self.cols))

    def column(self, c: int) -> Vector:
        return tuple(self.entries.get((r, c), ZERO) for r in range(self.rows))

    def to_rows(self) -> list[list[Fraction]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.entries.items()))))

    def __repr__(self) -> str:
        return f"QMatrix({self.rows}x{self.cols}, {len(self.entries)} nz)"

    # -- arithmetic ---------------------------------------------------
    def matvec(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.cols:
            raise InputError(f"matvec: vector of length {len(v)} against {self.cols} columns")
        acc = [ZERO] * self.rows
        for (r, c), a in self.entries.items():
            x = v[c]
            if x:
                acc[r] += a * x
        return tuple(acc)

    def matmul(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise InputError("matmul: inner dimensions differ")
        by_row: dict[int, dict[int, Fraction]] = {}
        for (r, k), a in self.entries.items():
            by_row.setdefault(r, {})[k] = a
        other_rows: dict[int, list[tuple[int, Fraction]]] = {}
        for (k, c), b in other.entries.items():
            other_rows.setdefault(k, []).append((c, b))
        entries: dict[tuple[int, int], Fraction] = {}
        for r, terms in by_row.items():
            acc: dict[int, Fraction] = {}
            for k, a in terms.items():
                for c, b in other_rows.get(k, ()):  # noqa: B905
                    acc[c] = acc.get(c, ZERO) + a * b
            for c, v in acc.items():
                if v != 0:
                    entries[(r, c)] = v
        return QMatrix(self.rows, other.cols, entries)

    def add(self, other: "QMatrix") -> "QMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InputError("add: shape mismatch")
        entries = dict(self.entries)
        for k, v in other.entries.items():
            entries[k] = entries.get(k, ZERO) + v
        return QMatrix(self.rows, self.cols, entries)

    def scale(self, c) -> "QMatrix":
        c = rat(c)
        return QMatrix(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})

    def transpose(self) -> "QMatrix":
        return QMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def hstack(self, other: "QMatrix") -> "QMatrix":
        if self.rows != other.rows:
            raise InputError("hstack: row count mismatch")
        entries = dict(self.entries)
        for (r, c), v in other.entries.items():
            entries[(r, c + self.cols)] = v
        return QMatrix(self.rows, self.cols + other.cols, entries)

    def vstack(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.cols:
            raise InputError("vstack: column count mismatch")
        entries = dict(self.entries)
        for (r, c), v in other.entries.items():
            entries[(r + self.rows, c)] = v
        return QMatrix(self.rows + other.rows, self.cols, entries)


# ---------------------------------------------------------------------------
# elimination engine
# ---------------------------------------------------------------------------

def _pivot_weight(x: Fraction) -> int:
    return (abs(x.numerator) * x.denominator).bit_length()


def _echelon_sparse(rows: list[dict[int, Fraction]], ncols: int, pivot_cols: int):
    """In-place reduced row echelon form on dict rows.

    Pivots are only chosen among the first ``pivot_cols`` columns; trailing
    columns ride along (used for augmented solves).  Returns the ordered list
    of pivot column indices.
    """
    pivots: list[int] = []
    top = 0
    nrows = len(rows)
    for col in range(pivot_cols):
        best = -1
        best_w = None
        for i in range(top, nrows):
            v = rows[i].get(col)
            if v:
                w = _pivot_weight(v)
                if best_w is None or w < best_w:
                    best, best_w = i, w
        if best < 0:
            continue
        rows[top], rows[best] = rows[best], rows[top]
        prow = rows[top]
        inv = ONE / prow[col]
        if inv != 1:
            for c in list(prow):
                prow[c] *= inv
        for i in range(nrows):
            if i == top:
                continue
            f = rows[i].get(col)
            if f:
                ri = rows[i]
                for c, v in prow.items():
                    nv = ri.get(c, ZERO) - f * v
                    if nv:
                        ri[c] = nv
                    elif c in ri:
                        del ri[c]
        pivots.append(col)
        top += 1
        if top == nrows:
            break
    return pivots


def _echelon_dense(rows: list[list[Fraction]], ncols: int, pivot_cols: int):
    pivots: list[int] = []
    top = 0
    nrows = len(rows)
    for col in range(pivot_cols):
        best = -1
        best_w = None
        for i in range(top, nrows):
            v = rows[i][col]
            if v:
                w = _pivot_weight(v)
                if best_w is None or w < best_w:
                    best, best_w = i, w
        if best < 0:
            continue
        rows[top], rows[best] = rows[best], rows[top]
        prow = rows[top]
        inv = ONE / prow[col]
        if inv != 1:
            for c in range(ncols):
                if prow[c]:
                    prow[c] *= inv
        for i in range(nrows):
            if i == top:
                continue
            f = rows[i][col]
            if f:
                ri = rows[i]
                for c in range(col, ncols):
                    if prow[c]:
                        ri[c] -= f * prow[c]
        pivots.append(col)
        top += 1
        if top == nrows:
            break
    return pivots


def _echelon(m: QMatrix, pivot_cols: Optional[int] = None):
    """Return (rows-as-dicts, pivots) for the RREF of ``m``."""
    if pivot_cols is None:
        pivot_cols = m.cols
    if m.cols < DENSE_COLUMN_LIMIT:
        dense = m.to_rows()
        pivots = _echelon_dense(dense, m.cols, pivot_cols)
        rows = [{c: v for c, v in enumerate(row) if v != 0} for row in dense]
    else:
        rows = [dict() for _ in range(m.rows)]
        for (r, c), v in m.entries.items():
            rows[r][c] = v
        pivots = _echelon_sparse(rows, m.cols, pivot_cols)
    return rows, pivots


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def rref(m: QMatrix) -> tuple[int, tuple[int, ...], QMatrix]:
    """Reduced row echelon form: ``(rank, pivot columns, reduced matrix)``."""
    rows, pivots = _echelon(m)
    entries = {}
    for r, row in enumerate(rows):
        for c, v in row.items():
            entries[(r, c)] = v
    return len(pivots), tuple(pivots), QMatrix(m.rows, m.cols, entries)


def rank(m: QMatrix) -> int:
    return rref(m)[0]


def _canonical_sort(vectors: list[Vector]) -> list[Vector]:
    def key(v: Vector):
        first = next((i for i, x in enumerate(v) if x != 0), len(v))
        return (first, v)

    out = []
    for v in vectors:
        lead = next((x for x in v if x != 0), None)
        out.append(vec_scale(ONE / lead, v) if lead is not None and lead != 1 else v)
    return sorted(out, key=key)


def kernel_basis(m: QMatrix) -> list[Vector]:
    """Canonical basis of the right kernel ``{v : m v = 0}``."""
    _, pivots, red = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for r, p in enumerate(pivots):
            coeff = red.entry(r, f)
            if coeff:
                v[p] = -coeff
        basis.append(tuple(v))
    return _canonical_sort(basis)


def solve(m: QMatrix, b: Sequence[Fraction]) -> Optional[Vector]:
    """A particular solution of ``m x = b`` (free variables zero), or None."""
    if len(b) != m.rows:
        raise InputError(f"solve: rhs of length {len(b)} against {m.rows} rows")
    return solve_many(m, [tuple(b)])[0]


def solve_many(m: QMatrix, rhs: Sequence[Vector]) -> list[Optional[Vector]]:
    """Solve ``m x = b`` for several right-hand sides with one elimination."""
    k = len(rhs)
    if k == 0:
        return []
    aug = QMatrix(
        m.rows,
        m.cols + k,
        dict(m.entries)
        | {
            (r, m.cols + j): v
            for j, b in enumerate(rhs)
            for r, v in enumerate(b)
            if v != 0
        },
    )
    for b in rhs:
        if len(b) != m.rows:
            raise InputError("solve_many: rhs length mismatch")
    rows, pivots = _echelon(aug, pivot_cols=m.cols)
    nz_rows = len(pivots)
    out: list[Optional[Vector]] = []
    for j in range(k):
        col = m.cols + j
        consistent = True
        for r in range(nz_rows, m.rows):
            if rows[r].get(col):
                consistent = False
                break
        if not consistent:
            out.append(None)
            continue
        x = [ZERO] * m.cols
        for r, p in enumerate(pivots):
            v = rows[r].get(col)
            if v:
                x[p] = v
        out.append(tuple(x))
    return out


def column_space_basis(m: QMatrix) -> list[Vector]:
    """Canonical basis of the column space (RREF rows of the transpose)."""
    rows, pivots = _echelon(m.transpose())
    basis = []
    for r in range(len(pivots)):
        basis.append(tuple(rows[r].get(c, ZERO) for c in range(m.rows)))
    return _canonical_sort(basis)


def complement_basis(sub: Sequence[Vector], ambient_dim: int) -> list[Vector]:
    """Standard basis vectors completing ``span(sub)`` to the ambient space."""
    for v in sub:
        if len(v) != ambient_dim:
            raise InputError("complement_basis: vector outside ambient space")
    if not sub:
        return [unit_vector(ambient_dim, i) for i in range(ambient_dim)]
    _, pivots, _ = rref(QMatrix.from_rows(list(sub), ambient_dim))
    pivot_set = set(pivots)
    return [unit_vector(ambient_dim, j) for j in range(ambient_dim) if j not in pivot_set]


class RowSpace:
    """Incrementally maintained row space with exact membership tests."""

    def __init__(self, dim: int, vectors: Iterable[Vector] = ()):  # noqa: D401
        self.dim = dim
        self._rows: dict[int, dict[int, Fraction]] = {}
        for v in vectors:
            self.add(v)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, v: Sequence[Fraction]) -> dict[int, Fraction]:
        if len(v) != self.dim:
            raise InputError("RowSpace: vector of wrong length")
        work = {i: rat(x) for i, x in enumerate(v) if x != 0}
        for p in sorted(self._rows):
            f = work.get(p)
            if f:
                row = self._rows[p]
                for c, rv in row.items():
                    nv = work.get(c, ZERO) - f * rv
                    if nv:
                        work[c] = nv
                    elif c in work:
                        del work[c]
        return work

    def contains(self, v: Sequence[Fraction]) -> bool:
        return not self.reduce(v)

    def add(self, v: Sequence[Fraction]) -> bool:
        """Insert ``v``; True if it enlarged the span."""
        res = self.reduce(v)
        if not res:
            return False
        p = min(res)
        inv = ONE / res[p]
        new_row = {c: inv * x for c, x in res.items()}
        for q, row in self._rows.items():
            f = row.get(p)
            if f:
                for c, rv in new_row.items():
                    nv = row.get(c, ZERO) - f * rv
                    if nv:
                        row[c] = nv
                    elif c in row:
                        del row[c]
        self._rows[p] = new_row
        return True

    def basis(self) -> list[Vector]:
        out = []
        for p in sorted(self._rows):
            row = self._rows[p]
            out.append(tuple(row.get(c, ZERO) for c in range(self.dim)))
        return out
