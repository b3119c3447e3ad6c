"""Exact rational linear algebra.

Dense matrices of :class:`fractions.Fraction` for the small splitting problems,
plus a sparse incremental echelon basis used by the truncated ideal code where
the ambient dimension runs into the thousands.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, Sequence

Vector = list  # list[Fraction]
SparseVec = dict  # dict[int, Fraction]


class NoSolution(ValueError):
    """Raised by :func:`solve` when the right-hand side is not in the image."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Matrix:
    """Dense row-major matrix with exact rational entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        if entries is None:
            self.entries = [Fraction(0)] * (rows * cols)
        else:
            if len(entries) != rows * cols:
                raise ValueError("entry count does not match shape")
            self.entries = [as_fraction(e) for e in entries]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = list(rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        flat = []
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
            flat.extend(r)
        return cls(len(rows), cols, flat)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        m = cls(rows, len(columns))
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise ValueError("column length mismatch")
            for i, v in enumerate(col):
                m[i, j] = v
        return m

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        m = cls(n, n)
        for i in range(n):
            m[i, i] = Fraction(1)
        return m

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def __setitem__(self, ij, value):
        i, j = ij
        self.entries[i * self.cols + j] = as_fraction(value)

    def row(self, i: int) -> list[Fraction]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> list[Fraction]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> list[list[Fraction]]:
        return [self.row(i) for i in range(self.rows)]

    def copy(self) -> "Matrix":
        return Matrix(self.rows, self.cols, list(self.entries))

    def transpose(self) -> "Matrix":
        t = Matrix(self.cols, self.rows)
        for i in range(self.rows):
            for j in range(self.cols):
                t.entries[j * self.rows + i] = self.entries[i * self.cols + j]
        return t

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.entries)))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_fraction(x) for x in self.row(i)) for i in range(self.rows))
        return f"Matrix({self.rows}x{self.cols}: [{body}])"

    def __add__(self, other: "Matrix") -> "Matrix":
        _same_shape(self, other)
        return Matrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        _same_shape(self, other)
        return Matrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c) -> "Matrix":
        c = as_fraction(c)
        return Matrix(self.rows, self.cols, [c * a for a in self.entries])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = Matrix(self.rows, other.cols)
        oc = other.cols
        for i in range(self.rows):
            base = i * self.cols
            acc = [Fraction(0)] * oc
            for k in range(self.cols):
                a = self.entries[base + k]
                if a:
                    orow = k * oc
                    for j in range(oc):
                        b = other.entries[orow + j]
                        if b:
                            acc[j] += a * b
            out.entries[i * oc:(i + 1) * oc] = acc
        return out

    def apply(self, v: Sequence) -> list[Fraction]:
        if len(v) != self.cols:
            raise ValueError("vector length does not match matrix columns")
        out = []
        for i in range(self.rows):
            base = i * self.cols
            s = Fraction(0)
            for j, x in enumerate(v):
                if x:
                    a = self.entries[base + j]
                    if a:
                        s += a * x
            out.append(s)
        return out

    def is_zero(self) -> bool:
        return not any(self.entries)


def _same_shape(a: Matrix, b: Matrix) -> None:
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ValueError("shape mismatch")


def _as_matrix(m) -> Matrix:
    return m if isinstance(m, Matrix) else Matrix.from_rows(m)


def rref(m) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form and the (strictly increasing) pivot columns."""
    m = _as_matrix(m)
    rows = m.to_rows()
    n_rows, n_cols = m.rows, m.cols
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        piv = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        prow = rows[r]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return Matrix.from_rows(rows, n_cols) if n_rows else Matrix(0, n_cols), pivots


def rank(m) -> int:
    return len(rref(m)[1])


def kernel_basis(m) -> list[list[Fraction]]:
    """Basis of the null space, one vector per non-pivot column (set to 1)."""
    m = _as_matrix(m)
    red, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = [Fraction(0)] * m.cols
        v[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r, free]
        basis.append(v)
    return basis


def solve(m, b: Sequence) -> list[Fraction]:
    """Particular solution of ``m x = b`` with all non-pivot coordinates zero."""
    m = _as_matrix(m)
    if len(b) != m.rows:
        raise ValueError("right-hand side length does not match matrix rows")
    aug = Matrix(m.rows, m.cols + 1)
    for i in range(m.rows):
        for j in range(m.cols):
            aug[i, j] = m[i, j]
        aug[i, m.cols] = b[i]
    red, pivots = rref(aug)
    if pivots and pivots[-1] == m.cols:
        raise NoSolution("right-hand side is not in the column space")
    x = [Fraction(0)] * m.cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r, m.cols]
    return x


def column_space_basis(vectors: Sequence[Sequence], dim: int) -> list[int]:
    """Indices of a maximal independent prefix-greedy subset of ``vectors``."""
    if not vectors:
        return []
    mat = Matrix.from_columns(list(vectors), dim)
    return rref(mat)[1]


def span_rank(vectors: Sequence[Sequence], dim: int) -> int:
    if not vectors:
        return 0
    return rank(Matrix.from_rows([list(v) for v in vectors], dim))


def subspace_equal(gens_a: Sequence[Sequence], gens_b: Sequence[Sequence]) -> bool:
    """True iff the two families span the same subspace."""
    dims = {len(v) for v in list(gens_a) + list(gens_b)}
    if len(dims) > 1:
        raise ValueError("vectors of different ambient dimension")
    if not dims:
        return True
    dim = dims.pop()
    ra = span_rank(gens_a, dim)
    rb = span_rank(gens_b, dim)
    if ra != rb:
        return False
    return span_rank(list(gens_a) + list(gens_b), dim) == ra


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise ValueError("inverse of non-square matrix")
    n = m.rows
    aug = Matrix(n, 2 * n)
    for i in range(n):
        for j in range(n):
            aug[i, j] = m[i, j]
        aug[i, n + i] = Fraction(1)
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    out = Matrix(n, n)
    for i in range(n):
        for j in range(n):
            out[i, j] = red[i, n + j]
    return out


class EchelonBasis:
    """Incrementally maintained sparse semi-echelon basis.

    Every stored row has its smallest column as pivot and no two rows share a
    pivot. Reduction subtracts rows smallest-pivot first, which yields the
    unique representative with zero pivot coordinates.
    """

    def __init__(self):
        self.rows: dict[int, SparseVec] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v: SparseVec) -> SparseVec:
        v = {k: c for k, c in v.items() if c}
        rows = self.rows
        if not rows:
            return v
        cand = sorted(k for k in v if k in rows)
        heapq.heapify(cand)
        seen = set(cand)
        while cand:
            k = heapq.heappop(cand)
            c = v.get(k)
            if not c:
                continue
            for j, a in rows[k].items():
                nv = v.get(j, 0) - c * a
                if nv:
                    v[j] = nv
                    if j in rows and j not in seen:
                        seen.add(j)
                        heapq.heappush(cand, j)
                else:
                    v.pop(j, None)
        return v

    def add(self, v: SparseVec) -> bool:
        """Insert ``v``; return True if it enlarged the span."""
        r = self.reduce(v)
        if not r:
            return False
        piv = min(r)
        inv = 1 / r[piv]
        self.rows[piv] = {k: c * inv for k, c in r.items()}
        return True

    def contains(self, v: SparseVec) -> bool:
        return not self.reduce(v)

    def pivots(self) -> list[int]:
        return sorted(self.rows)


def dense_to_sparse(v: Iterable) -> SparseVec:
    return {i: as_fraction(x) for i, x in enumerate(v) if x}
