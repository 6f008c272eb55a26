"""Exact matrices over the ring tower.

A Matrix with r rows and c columns represents a morphism from the based free
module of rank c to the based free module of rank r; composition is matrix
product with the left factor applied second.  Entries are stored in the raw
canonical form of rings.py; all matrices are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import IncompatibleRings, NotAUnit
from . import rings as rg
from .rings import RingSpec, Scalar


@dataclass(frozen=True)
class Matrix:
    ring: RingSpec
    rows: int
    cols: int
    data: tuple  # tuple of row tuples of raw values

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(row) != self.cols for row in self.data):
            raise ValueError("matrix data does not match declared shape")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_rows(R: RingSpec, rows, nrows=None, ncols=None) -> "Matrix":
        data = tuple(
            tuple(rg._canonicalize(R, v) for v in row)  # noqa: SLF001 (shared canonicalizer)
            for row in rows
        )
        r = len(data) if nrows is None else nrows
        c = (len(data[0]) if data else 0) if ncols is None else ncols
        if r == 0 or c == 0:
            return Matrix.zero(R, r, c)
        return Matrix(R, r, c, data)

    @staticmethod
    def zero(R: RingSpec, rows: int, cols: int) -> "Matrix":
        z = rg.zero(R)
        return Matrix(R, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @staticmethod
    def identity(R: RingSpec, n: int) -> "Matrix":
        z, o = rg.zero(R), rg.one(R)
        return Matrix(R, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @staticmethod
    def scalar_matrix(R: RingSpec, n: int, value) -> "Matrix":
        v = rg._canonicalize(R, value)
        z = rg.zero(R)
        return Matrix(R, n, n, tuple(tuple(v if i == j else z for j in range(n)) for i in range(n)))

    # -- basics -------------------------------------------------------------

    def entry(self, i: int, j: int) -> Scalar:
        return Scalar(self.ring, self.data[i][j])

    def is_zero(self) -> bool:
        return all(rg.is_zero(self.ring, v) for row in self.data for v in row)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in matrix sum")
        R = self.ring
        return Matrix(R, self.rows, self.cols, tuple(
            tuple(rg.add(R, a, b) for a, b in zip(ra, rb))
            for ra, rb in zip(self.data, other.data)
        ))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        R = self.ring
        return Matrix(R, self.rows, self.cols, tuple(
            tuple(rg.neg(R, a) for a in row) for row in self.data
        ))

    def __mul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        R = self.ring
        if self.rows == 0 or self.cols == 0 or other.cols == 0:
            return Matrix.zero(R, self.rows, other.cols)
        zero = rg.zero(R)
        bt = tuple(zip(*other.data))
        out = []
        for row in self.data:
            out_row = []
            for col in bt:
                acc = zero
                for a, b in zip(row, col):
                    if not rg.is_zero(R, a) and not rg.is_zero(R, b):
                        acc = rg.add(R, acc, rg.mul(R, a, b))
                out_row.append(acc)
            out.append(tuple(out_row))
        return Matrix(R, self.rows, other.cols, tuple(out))

    def scale(self, value) -> "Matrix":
        v = rg._canonicalize(self.ring, value)
        R = self.ring
        return Matrix(R, self.rows, self.cols, tuple(
            tuple(rg.mul(R, v, a) for a in row) for row in self.data
        ))

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, self.cols, self.rows, tuple(zip(*self.data)) if self.data and self.cols else tuple(() for _ in range(self.cols)))

    def star(self) -> "Matrix":
        """Involution-transpose: entrywise involution, then transpose."""
        R = self.ring
        inv = tuple(tuple(rg.involve(R, a) for a in row) for row in self.data)
        m = Matrix(R, self.rows, self.cols, inv)
        return m.transpose()

    def _check(self, other: "Matrix"):
        if self.ring != other.ring:
            raise IncompatibleRings(f"{self.ring!r} vs {other.ring!r}")

    def __str__(self):
        return "[" + "; ".join(", ".join(rg.to_str(self.ring, v) for v in row) for row in self.data) + "]"

    # -- block structure ----------------------------------------------------

    @staticmethod
    def block(R: RingSpec, grid) -> "Matrix":
        """Assemble a matrix from a grid of blocks (lists of lists of Matrix)."""
        row_heights = [row[0].rows for row in grid]
        col_widths = [b.cols for b in grid[0]] if grid else []
        for row in grid:
            for j, b in enumerate(row):
                if b.cols != col_widths[j]:
                    raise ValueError("inconsistent block widths")
        data = []
        for bi, row in enumerate(grid):
            for b in row:
                if b.rows != row_heights[bi]:
                    raise ValueError("inconsistent block heights")
            for i in range(row_heights[bi]):
                data.append(tuple(v for b in row for v in b.data[i]))
        return Matrix(R, sum(row_heights), sum(col_widths), tuple(data))

    @staticmethod
    def direct_sum(R: RingSpec, blocks) -> "Matrix":
        blocks = list(blocks)
        grid = []
        for i, b in enumerate(blocks):
            grid.append([
                b if i == j else Matrix.zero(R, b.rows, blocks[j].cols)
                for j in range(len(blocks))
            ])
        if not grid:
            return Matrix.zero(R, 0, 0)
        return Matrix.block(R, grid)

    def submatrix(self, row_idx, col_idx) -> "Matrix":
        return Matrix(self.ring, len(row_idx), len(col_idx), tuple(
            tuple(self.data[i][j] for j in col_idx) for i in row_idx
        ))

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product (second factor runs fastest), same ring."""
        self._check(other)
        R = self.ring
        data = []
        for i in range(self.rows):
            for k in range(other.rows):
                row = []
                for j in range(self.cols):
                    a = self.data[i][j]
                    if rg.is_zero(R, a):
                        row.extend([rg.zero(R)] * other.cols)
                    else:
                        row.extend(rg.mul(R, a, b) for b in other.data[k])
                data.append(tuple(row))
        return Matrix(R, self.rows * other.rows, self.cols * other.cols, tuple(data))

    def map_ring(self, dst: RingSpec, rename: dict | None = None) -> "Matrix":
        """Entrywise embedding into a larger ring of the tower."""
        return Matrix(dst, self.rows, self.cols, tuple(
            tuple(rg.embed(self.ring, dst, v, rename) for v in row) for row in self.data
        ))

    # -- determinant / inverse ----------------------------------------------

    def det(self):
        """Determinant by fraction-free (Bareiss) elimination; raw value."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        R = self.ring
        if n == 0:
            return rg.one(R)
        m = [list(row) for row in self.data]
        sign = 1
        prev = rg.one(R)
        for k in range(n - 1):
            if rg.is_zero(R, m[k][k]):
                for i in range(k + 1, n):
                    if not rg.is_zero(R, m[i][k]):
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return rg.zero(R)
            pivot = m[k][k]
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = rg.sub(R, rg.mul(R, pivot, m[i][j]), rg.mul(R, m[i][k], m[k][j]))
                    m[i][j] = rg.exact_div(R, num, prev)
                m[i][k] = rg.zero(R)
            prev = pivot
        d = m[n - 1][n - 1]
        return rg.neg(R, d) if sign < 0 else d

    def is_invertible(self) -> bool:
        return self.rows == self.cols and rg.is_unit(self.ring, self.det())

    def inverse(self) -> "Matrix":
        """Inverse of a matrix whose determinant is a unit of the ring."""
        if self.rows != self.cols:
            raise NotAUnit("non-square matrix")
        R = self.ring
        n = self.rows
        d = self.det()
        if not rg.is_unit(R, d):
            raise NotAUnit(f"determinant {rg.to_str(R, d)} is not a unit of {R!r}")
        if n == 0:
            return self
        if R.is_field:
            return self._inverse_field()
        if R == rg.ZZ:
            q = self.map_ring(rg.QQ)._inverse_field()
            return Matrix.from_rows(rg.ZZ, [[v for v in row] for row in q.data])
        dinv = rg.unit_inverse(R, d)
        idx = list(range(n))
        cof = []
        for i in range(n):
            row = []
            for j in range(n):
                minor = self.submatrix([r for r in idx if r != j], [c for c in idx if c != i])
                c = minor.det()
                if (i + j) % 2:
                    c = rg.neg(R, c)
                row.append(rg.mul(R, c, dinv))
            cof.append(tuple(row))
        return Matrix(R, n, n, tuple(cof))

    def _inverse_field(self) -> "Matrix":
        R = self.ring
        n = self.rows
        aug = [list(self.data[i]) + list(Matrix.identity(R, n).data[i]) for i in range(n)]
        for k in range(n):
            piv = next((i for i in range(k, n) if not rg.is_zero(R, aug[i][k])), None)
            if piv is None:
                raise NotAUnit("singular matrix")
            aug[k], aug[piv] = aug[piv], aug[k]
            inv = rg.unit_inverse(R, aug[k][k])
            aug[k] = [rg.mul(R, inv, v) for v in aug[k]]
            for i in range(n):
                if i != k and not rg.is_zero(R, aug[i][k]):
                    f = aug[i][k]
                    aug[i] = [rg.sub(R, a, rg.mul(R, f, b)) for a, b in zip(aug[i], aug[k])]
        return Matrix(R, n, n, tuple(tuple(row[n:]) for row in aug))
