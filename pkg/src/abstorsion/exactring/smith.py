"""Smith normal form with tracked transforms, and the linear solving built on it.

Supported rings: ZZ, QQ, F_p, and single-variable Laurent rings over a field
(reduced to the polynomial ring by clearing a power of the variable).  The
factorization convention is m = left * diag * right with left and right
invertible over the ring and the diagonal entries forming a divisibility
chain.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UnsupportedRing
from . import rings as rg
from .matrix import Matrix
from .rings import RingSpec


def supports_smith(R: RingSpec) -> bool:
    if R.kind in (rg.INTEGERS, rg.RATIONALS, rg.PRIME_FIELD):
        return True
    return R.kind == rg.LAURENT and len(R.vars) == 1 and R.base.is_field


def _require_smith(R: RingSpec):
    if not supports_smith(R):
        raise UnsupportedRing(
            f"Smith normal form is not available over {R!r} "
            "(supported: ZZ, QQ, F_p, one-variable Laurent over a field)"
        )


# -- Euclidean structure ------------------------------------------------------


def _size(R: RingSpec, a):
    """Euclidean size: |a| over ZZ, degree span over F[t,t^-1], 1 over fields."""
    if rg.is_zero(R, a):
        return 0
    if R.kind == rg.INTEGERS:
        return abs(a)
    if R.is_field:
        return 1
    exps = [e[0] for e, _ in a]
    return max(exps) - min(exps) + 1


def _divmod(R: RingSpec, a, b):
    if R.kind == rg.INTEGERS:
        q, r = divmod(a, b)
        # keep |r| minimal-ish; python's divmod already gives |r| < |b|
        return q, r
    if R.is_field:
        return rg.mul(R, a, rg.unit_inverse(R, b)), rg.zero(R)
    return _laurent_divmod(R, a, b)


def _laurent_divmod(R: RingSpec, a, b):
    """Division with remainder in F[t, t^-1]: size(r) < size(b) or r = 0.

    Works on the polynomial parts after factoring the unit t^minexp out of b.
    """
    if rg.is_zero(R, a):
        return rg.zero(R), rg.zero(R)
    base = R.base
    b_exps = [e[0] for e, _ in b]
    b_low = min(b_exps)
    b_high = max(b_exps)
    b_lead = next(c for e, c in b if e[0] == b_high)
    quo = rg.zero(R)
    rem = a
    while not rg.is_zero(R, rem) and _size(R, rem) >= _size(R, b):
        r_high = max(e[0] for e, _ in rem)
        r_low = min(e[0] for e, _ in rem)
        r_lead = next(c for e, c in rem if e[0] == r_high)
        # cancel the leading term of rem against the leading term of b, but
        # anchored at the low end so exponents stay above r_low - b_low
        shift = r_high - b_high
        factor = rg.monomial(R, (shift,), rg.mul(base, r_lead, rg.unit_inverse(base, b_lead)))
        quo = rg.add(R, quo, factor)
        rem = rg.sub(R, rem, rg.mul(R, factor, b))
    return quo, rem


def _unit_normalizer(R: RingSpec, a):
    """A unit u with u*a canonical: positive (ZZ), 1 (fields), monic with
    lowest exponent 0 (Laurent)."""
    if R.kind == rg.INTEGERS:
        return -1 if a < 0 else 1
    if R.is_field:
        return rg.unit_inverse(R, a)
    low = min(e[0] for e, _ in a)
    high = max(e[0] for e, _ in a)
    lead = next(c for e, c in a if e[0] == high)
    return rg.monomial(R, (-low,), rg.unit_inverse(R.base, lead))


# -- tracked elimination ------------------------------------------------------


class _Tracked:
    """Mutable S with U, Uinv, V, Vinv maintained so that m = U S V always."""

    def __init__(self, m: Matrix):
        self.R = m.ring
        self.S = [list(row) for row in m.data]
        self.rows = m.rows
        self.cols = m.cols
        self.U = [list(row) for row in Matrix.identity(self.R, m.rows).data]
        self.Uinv = [list(row) for row in Matrix.identity(self.R, m.rows).data]
        self.V = [list(row) for row in Matrix.identity(self.R, m.cols).data]
        self.Vinv = [list(row) for row in Matrix.identity(self.R, m.cols).data]

    def row_swap(self, i, j):
        if i == j:
            return
        self.S[i], self.S[j] = self.S[j], self.S[i]
        self.Uinv[i], self.Uinv[j] = self.Uinv[j], self.Uinv[i]
        for row in self.U:
            row[i], row[j] = row[j], row[i]

    def col_swap(self, i, j):
        if i == j:
            return
        for row in self.S:
            row[i], row[j] = row[j], row[i]
        self.V[i], self.V[j] = self.V[j], self.V[i]
        for row in self.Vinv:
            row[i], row[j] = row[j], row[i]

    def row_addmul(self, i, j, c):
        """row_i += c * row_j on S."""
        R = self.R
        if rg.is_zero(R, c):
            return
        self.S[i] = [rg.add(R, a, rg.mul(R, c, b)) for a, b in zip(self.S[i], self.S[j])]
        self.Uinv[i] = [rg.add(R, a, rg.mul(R, c, b)) for a, b in zip(self.Uinv[i], self.Uinv[j])]
        for row in self.U:
            row[j] = rg.sub(R, row[j], rg.mul(R, c, row[i]))

    def col_addmul(self, j, i, c):
        """col_j += c * col_i on S."""
        R = self.R
        if rg.is_zero(R, c):
            return
        for row in self.S:
            row[j] = rg.add(R, row[j], rg.mul(R, c, row[i]))
        for row in self.Vinv:
            row[j] = rg.add(R, row[j], rg.mul(R, c, row[i]))
        self.V[i] = [rg.sub(R, a, rg.mul(R, c, b)) for a, b in zip(self.V[i], self.V[j])]

    def row_scale(self, i, u):
        R = self.R
        uinv = rg.unit_inverse(R, u)
        self.S[i] = [rg.mul(R, u, a) for a in self.S[i]]
        self.Uinv[i] = [rg.mul(R, u, a) for a in self.Uinv[i]]
        for row in self.U:
            row[i] = rg.mul(R, row[i], uinv)


@dataclass(frozen=True)
class SmithResult:
    left: Matrix
    diag: Matrix
    right: Matrix
    left_inv: Matrix
    right_inv: Matrix
    rank: int

    @property
    def divisors(self):
        return tuple(
            self.diag.data[i][i] for i in range(min(self.diag.rows, self.diag.cols))
        )


def smith_with_transforms(m: Matrix) -> SmithResult:
    _require_smith(m.ring)
    R = m.ring
    work = m
    shift = None
    if R.kind == rg.LAURENT:
        exps = [e[0] for row in m.data for v in row for e, _ in v]
        low = min(exps) if exps else 0
        if low < 0:
            shift = -low
            work = m.scale(rg.monomial(R, (shift,)))
    t = _Tracked(work)
    _eliminate(t)
    rank = sum(1 for i in range(min(t.rows, t.cols)) if not rg.is_zero(R, t.S[i][i]))
    U = Matrix(R, t.rows, t.rows, tuple(tuple(r) for r in t.U))
    Uinv = Matrix(R, t.rows, t.rows, tuple(tuple(r) for r in t.Uinv))
    V = Matrix(R, t.cols, t.cols, tuple(tuple(r) for r in t.V))
    Vinv = Matrix(R, t.cols, t.cols, tuple(tuple(r) for r in t.Vinv))
    S = Matrix(R, t.rows, t.cols, tuple(tuple(r) for r in t.S))
    if shift:
        back = rg.monomial(R, (-shift,))
        U = U.scale(back)
        Uinv = Uinv.scale(rg.monomial(R, (shift,)))
    return SmithResult(U, S, V, Uinv, Vinv, rank)


def _eliminate(t: _Tracked):
    R = t.R
    n = min(t.rows, t.cols)
    for k in range(n):
        while True:
            pivot = _find_pivot(t, k)
            if pivot is None:
                break
            t.row_swap(k, pivot[0])
            t.col_swap(k, pivot[1])
            if _clear_cross(t, k):
                continue
            bad = _find_nondivisible(t, k)
            if bad is None:
                break
            t.row_addmul(k, bad, rg.one(R))
        if not rg.is_zero(R, t.S[k][k]):
            t.row_scale(k, _unit_normalizer(R, t.S[k][k]))


def _find_pivot(t: _Tracked, k):
    R = t.R
    best = None
    best_size = None
    for i in range(k, t.rows):
        for j in range(k, t.cols):
            v = t.S[i][j]
            if rg.is_zero(R, v):
                continue
            s = _size(R, v)
            if best is None or s < best_size:
                best, best_size = (i, j), s
                if s == 1:
                    return best
    return best


def _clear_cross(t: _Tracked, k) -> bool:
    """Reduce row k and column k by the pivot; return True if the pivot shrank
    (a nonzero remainder got swapped in) and the loop must restart."""
    R = t.R
    changed = True
    while changed:
        changed = False
        for i in range(k + 1, t.rows):
            v = t.S[i][k]
            if rg.is_zero(R, v):
                continue
            q, r = _divmod(R, v, t.S[k][k])
            t.row_addmul(i, k, rg.neg(R, q))
            if not rg.is_zero(R, r):
                t.row_swap(i, k)
                changed = True
        for j in range(k + 1, t.cols):
            v = t.S[k][j]
            if rg.is_zero(R, v):
                continue
            q, r = _divmod(R, v, t.S[k][k])
            t.col_addmul(j, k, rg.neg(R, q))
            if not rg.is_zero(R, r):
                t.col_swap(j, k)
                changed = True
    return False


def _find_nondivisible(t: _Tracked, k):
    R = t.R
    pivot = t.S[k][k]
    for i in range(k + 1, t.rows):
        for j in range(k + 1, t.cols):
            v = t.S[i][j]
            if rg.is_zero(R, v):
                continue
            _, r = _divmod(R, v, pivot)
            if not rg.is_zero(R, r):
                return i
    return None


def smith_split(m: Matrix):
    """left * diag * right = m with left, right invertible; divisibility chain."""
    res = smith_with_transforms(m)
    return res.left, res.diag, res.right


def solve(m: Matrix, b: Matrix):
    """One solution X of m X = b over the ring, or None if unsolvable."""
    if m.ring != b.ring or m.rows != b.rows:
        raise ValueError("shape/ring mismatch in solve")
    res = smith_with_transforms(m)
    R = m.ring
    c = res.left_inv * b
    n = min(m.rows, m.cols)
    y_rows = []
    for i in range(m.cols):
        if i < n and not rg.is_zero(R, res.diag.data[i][i]):
            s = res.diag.data[i][i]
            row = []
            for v in c.data[i]:
                try:
                    row.append(rg.exact_div(R, v, s))
                except (ArithmeticError, ZeroDivisionError):
                    return None
            y_rows.append(tuple(row))
        else:
            y_rows.append(tuple(rg.zero(R) for _ in range(b.cols)))
    for i in range(m.rows):
        if i < n and not rg.is_zero(R, res.diag.data[i][i]):
            continue
        if any(not rg.is_zero(R, v) for v in c.data[i]):
            return None
    y = Matrix(R, m.cols, b.cols, tuple(y_rows))
    return res.right_inv * y


def kernel_basis(m: Matrix) -> Matrix:
    """Columns form a basis of ker(m) (free over the supported rings)."""
    res = smith_with_transforms(m)
    R = m.ring
    free = [
        j for j in range(m.cols)
        if j >= min(m.rows, m.cols) or rg.is_zero(R, res.diag.data[j][j])
    ]
    cols = [[res.right_inv.data[i][j] for j in free] for i in range(m.cols)]
    return Matrix(R, m.cols, len(free), tuple(tuple(row) for row in cols))


def homology_obstruction(d_in: Matrix, d_out: Matrix):
    """Elementary divisors of H = ker(d_out) / im(d_in), as a list of raw values.

    Nonunit entries (including zeros for free summands) witness nonzero
    homology; an empty list means H = 0.
    """
    R = d_out.ring
    ker = kernel_basis(d_out)
    if ker.cols == 0:
        return []
    expr = solve(ker, d_in)
    if expr is None:
        raise ArithmeticError("im(d_in) not contained in ker(d_out); d^2 != 0?")
    res = smith_with_transforms(expr)
    divisors = []
    n = min(expr.rows, expr.cols)
    for i in range(ker.cols):
        v = res.diag.data[i][i] if i < n else rg.zero(R)
        if not rg.is_unit(R, v):
            divisors.append(v)
    return divisors


def rank_over_field(m: Matrix) -> int:
    R = m.ring
    if not R.is_field:
        raise UnsupportedRing("rank_over_field needs a field")
    data = [list(row) for row in m.data]
    rank = 0
    for j in range(m.cols):
        piv = next((i for i in range(rank, m.rows) if not rg.is_zero(R, data[i][j])), None)
        if piv is None:
            continue
        data[rank], data[piv] = data[piv], data[rank]
        inv = rg.unit_inverse(R, data[rank][j])
        data[rank] = [rg.mul(R, inv, v) for v in data[rank]]
        for i in range(m.rows):
            if i != rank and not rg.is_zero(R, data[i][j]):
                f = data[i][j]
                data[i] = [rg.sub(R, a, rg.mul(R, f, b)) for a, b in zip(data[i], data[rank])]
        rank += 1
    return rank
