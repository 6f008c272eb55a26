"""Based and signed chain complexes and the sign algebra.

Conventions fixed here and used everywhere:

* a complex lives in degrees 0..n; the differential d[r] maps degree r to
  degree r-1 and d^2 = 0 is checked at construction;
* the dual of a based free module of rank k is based free of rank k with the
  dual basis in the same order; the involution-transpose of a matrix is
  entrywise involution followed by transpose;
* the dual complex C^{n-*} has (C^{n-*})_r = C^{n-r} with differential
  (-1)^r d^* out of degree r;
* the sign eta of a signed complex lies in the subgroup generated by
  tau(-1) and is stored as a single bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IncompatibleRings, InvalidComplex
from .exactring import rings as rg
from .exactring.k1 import K1Element, k1_sign
from .exactring.matrix import Matrix
from .exactring.rings import RingSpec, combine_rings


@dataclass(frozen=True)
class BasedComplex:
    """A finite based free chain complex; d[r]: dims[r] -> dims[r-1]."""

    ring: RingSpec
    dims: tuple
    d: tuple

    def __post_init__(self):
        n = len(self.dims) - 1
        if n < -1:
            raise InvalidComplex("a complex needs at least an empty degree list")
        if len(self.d) != len(self.dims):
            raise InvalidComplex("need one differential slot per degree (d[0] maps to zero)")
        for r, m in enumerate(self.d):
            below = self.dims[r - 1] if r >= 1 else 0
            if m.ring != self.ring or m.rows != below or m.cols != self.dims[r]:
                raise InvalidComplex(f"differential in degree {r} has the wrong shape/ring")
        for r in range(2, n + 1):
            if not (self.d[r - 1] * self.d[r]).is_zero():
                raise InvalidComplex(f"d^2 != 0 between degrees {r} and {r - 2}")

    @staticmethod
    def build(ring: RingSpec, dims, diffs) -> "BasedComplex":
        """diffs lists the differentials for degrees 1..n (degree r to r-1)."""
        dims = tuple(int(x) for x in dims)
        d = [Matrix.zero(ring, 0, dims[0] if dims else 0)]
        for r in range(1, len(dims)):
            m = diffs[r - 1] if r - 1 < len(diffs) else None
            if m is None:
                m = Matrix.zero(ring, dims[r - 1], dims[r])
            elif not isinstance(m, Matrix):
                m = Matrix.from_rows(ring, m, nrows=dims[r - 1], ncols=dims[r])
            d.append(m)
        return BasedComplex(ring, dims, tuple(d))

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def dim(self, r: int) -> int:
        return self.dims[r] if 0 <= r <= self.top else 0

    def diff(self, r: int) -> Matrix:
        if 1 <= r <= self.top:
            return self.d[r]
        return Matrix.zero(self.ring, self.dim(r - 1), self.dim(r))

    def total_rank(self) -> int:
        return sum(self.dims)

    def map_ring(self, dst: RingSpec, rename: dict | None = None) -> "BasedComplex":
        return BasedComplex(dst, self.dims, tuple(m.map_ring(dst, rename) for m in self.d))

    def __repr__(self):
        return f"BasedComplex({self.ring!r}, dims={list(self.dims)})"


def empty_complex(ring: RingSpec) -> BasedComplex:
    return BasedComplex.build(ring, (0,), [])


@dataclass(frozen=True)
class SignedComplex:
    """A based complex with a sign eta in {0, tau(-1)}, stored as a bit."""

    complex: BasedComplex
    eta: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eta", int(self.eta) % 2)

    @property
    def ring(self) -> RingSpec:
        return self.complex.ring

    def eta_k1(self) -> K1Element:
        return k1_sign(self.ring, self.eta)

    def with_eta(self, eta: int) -> "SignedComplex":
        return SignedComplex(self.complex, eta)


@dataclass(frozen=True)
class ChainMap:
    """Degreewise matrices f[r]: source_r -> target_r commuting with d."""

    source: BasedComplex
    target: BasedComplex
    f: tuple

    def __post_init__(self):
        if self.source.ring != self.target.ring:
            raise IncompatibleRings("chain map between complexes over different rings")
        top = max(self.source.top, self.target.top)
        if len(self.f) != top + 1:
            raise InvalidComplex("need one component per degree 0..max(top)")
        for r, m in enumerate(self.f):
            if m.ring != self.source.ring or m.rows != self.target.dim(r) or m.cols != self.source.dim(r):
                raise InvalidComplex(f"chain-map component in degree {r} has the wrong shape")
        for r in range(1, top + 1):
            lhs = self.component(r - 1) * self.source.diff(r)
            rhs = self.target.diff(r) * self.component(r)
            if not (lhs - rhs).is_zero():
                raise InvalidComplex(f"not a chain map in degree {r}")

    @staticmethod
    def build(source: BasedComplex, target: BasedComplex, comps) -> "ChainMap":
        top = max(source.top, target.top)
        f = []
        for r in range(top + 1):
            m = comps[r] if r < len(comps) else None
            if m is None:
                m = Matrix.zero(source.ring, target.dim(r), source.dim(r))
            elif not isinstance(m, Matrix):
                m = Matrix.from_rows(source.ring, m, nrows=target.dim(r), ncols=source.dim(r))
            f.append(m)
        return ChainMap(source, target, tuple(f))

    @property
    def ring(self) -> RingSpec:
        return self.source.ring

    def component(self, r: int) -> Matrix:
        if 0 <= r < len(self.f):
            return self.f[r]
        return Matrix.zero(self.ring, self.target.dim(r), self.source.dim(r))

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self o first (apply ``first``, then ``self``)."""
        if first.target is not self.source and first.target != self.source:
            raise InvalidComplex("composition endpoints do not match")
        top = max(first.source.top, self.target.top)
        comps = [self.component(r) * first.component(r) for r in range(top + 1)]
        return ChainMap(first.source, self.target, tuple(comps))

    def __add__(self, other: "ChainMap") -> "ChainMap":
        comps = [a + b for a, b in zip(self.f, other.f)]
        return ChainMap(self.source, self.target, tuple(comps))

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, tuple(-m for m in self.f))

    def is_degreewise_iso(self) -> bool:
        return all(m.rows == m.cols and m.is_invertible() for m in self.f)

    def degreewise_inverse(self) -> "ChainMap":
        return ChainMap(self.target, self.source, tuple(m.inverse() for m in self.f))


def identity_map(C: BasedComplex) -> ChainMap:
    return ChainMap(C, C, tuple(Matrix.identity(C.ring, C.dim(r)) for r in range(C.top + 1)))


def scalar_map(C: BasedComplex, value) -> ChainMap:
    """Multiplication by a central scalar, as a chain self-map."""
    return ChainMap(C, C, tuple(
        Matrix.scalar_matrix(C.ring, C.dim(r), value) for r in range(C.top + 1)
    ))


@dataclass(frozen=True)
class ChainHomotopy:
    """h with g - f = d h + h d, h[r]: source_r -> target_{r+1}."""

    f: ChainMap
    g: ChainMap
    h: tuple

    def __post_init__(self):
        if self.f.source != self.g.source or self.f.target != self.g.target:
            raise InvalidComplex("homotopy endpoints do not match")
        src, tgt = self.f.source, self.f.target
        top = max(src.top, tgt.top)
        if len(self.h) != top + 1:
            raise InvalidComplex("need one homotopy component per degree")
        for r, m in enumerate(self.h):
            if m.rows != tgt.dim(r + 1) or m.cols != src.dim(r):
                raise InvalidComplex(f"homotopy component in degree {r} has the wrong shape")
        for r in range(top + 1):
            want = self.g.component(r) - self.f.component(r)
            have = tgt.diff(r + 1) * self.component(r) + self.component(r - 1) * src.diff(r)
            if not (want - have).is_zero():
                raise InvalidComplex(f"homotopy identity fails in degree {r}")

    def component(self, r: int) -> Matrix:
        if 0 <= r < len(self.h):
            return self.h[r]
        return Matrix.zero(self.f.ring, self.f.target.dim(r + 1), self.f.source.dim(r))


# ---------------------------------------------------------------------------
# sign algebra
# ---------------------------------------------------------------------------


def euler(C: BasedComplex) -> int:
    """Euler characteristic under the rank isomorphism K_0 = Z."""
    return sum((-1) ** r * x for r, x in enumerate(C.dims))


def epsilon_bit(a: int, b: int) -> int:
    return (a * b) % 2


def epsilon(R: RingSpec, a: int, b: int) -> K1Element:
    """Sign of the block swap of modules with ranks a, b: (a*b) tau(-1)."""
    return k1_sign(R, epsilon_bit(a, b))


def beta_bit(C: BasedComplex, D: BasedComplex) -> int:
    total = 0
    top = max(C.top, D.top)
    for i in range(top // 2 + 1):
        for j in range(i):
            total += C.dim(2 * i) * D.dim(2 * j)
            total += C.dim(2 * i + 1) * D.dim(2 * j + 1)
    return total % 2


def beta(C: BasedComplex, D: BasedComplex) -> K1Element:
    """Intertwining sum_{i>j} (eps(C_2i, D_2j) - eps(C_{2i+1}, D_{2j+1}))."""
    if C.ring != D.ring:
        raise IncompatibleRings("beta over different rings")
    return k1_sign(C.ring, beta_bit(C, D))


def odd_rank(C: BasedComplex) -> int:
    return sum(C.dim(r) for r in range(1, C.top + 1, 2))


def even_rank(C: BasedComplex) -> int:
    return sum(C.dim(r) for r in range(0, C.top + 1, 2))


def alpha_bit(C: BasedComplex, n: int) -> int:
    total = 0
    for r in range(C.top + 1):
        if r % 4 in ((n + 2) % 4, (n + 3) % 4):
            total += C.dim(r)
    return total % 2


def alpha(C: BasedComplex, n: int) -> K1Element:
    """Duality sign term: sum of eps(C^r, C^r) over r = n+2, n+3 (mod 4)."""
    return k1_sign(C.ring, alpha_bit(C, n))


def suspend(C: SignedComplex) -> SignedComplex:
    """Degree shift up by one with SC_0 = 0; eta_SC = -eta_C."""
    base = C.complex
    dims = (0,) + base.dims
    d = [Matrix.zero(base.ring, 0, 0), Matrix.zero(base.ring, 0, base.dims[0])]
    for r in range(1, base.top + 1):
        d.append(base.d[r])
    # -eta = eta in the 2-torsion representation
    return SignedComplex(BasedComplex(base.ring, dims, tuple(d)), C.eta)


def suspend_complex(C: BasedComplex) -> BasedComplex:
    return suspend(SignedComplex(C, 0)).complex


def direct_sum_complex(C: BasedComplex, D: BasedComplex) -> BasedComplex:
    if C.ring != D.ring:
        raise IncompatibleRings("direct sum over different rings")
    top = max(C.top, D.top)
    dims = tuple(C.dim(r) + D.dim(r) for r in range(top + 1))
    d = [Matrix.zero(C.ring, 0, dims[0])]
    for r in range(1, top + 1):
        d.append(Matrix.direct_sum(C.ring, [C.diff(r), D.diff(r)]))
    return BasedComplex(C.ring, dims, tuple(d))


def direct_sum_eta_bit(C: SignedComplex, D: SignedComplex) -> int:
    return (
        C.eta
        + D.eta
        + beta_bit(C.complex, D.complex)
        + epsilon_bit(odd_rank(C.complex), euler(D.complex))
    ) % 2


def direct_sum(C: SignedComplex, D: SignedComplex) -> SignedComplex:
    """Block sum (C first) with eta_{C+D} = eta_C + eta_D - beta(C,D) + eps(C_odd, chi(D))."""
    return SignedComplex(direct_sum_complex(C.complex, D.complex), direct_sum_eta_bit(C, D))


def dual_complex(C: BasedComplex, n: int) -> BasedComplex:
    """(C^{n-*})_r = dual of C_{n-r}, differential (-1)^r d^* out of degree r."""
    if C.top > n:
        raise InvalidComplex(f"complex supported above degree n={n}")
    dims = tuple(C.dim(n - r) for r in range(n + 1))
    d = [Matrix.zero(C.ring, 0, dims[0])]
    for r in range(1, n + 1):
        m = C.diff(n - r + 1).star()
        if r % 2:
            m = -m
        d.append(m)
    return BasedComplex(C.ring, dims, tuple(d))


def dual_eta_bit(C: SignedComplex, n: int) -> int:
    """eta of the dual: (-1)^{n+1} eta* + (-1)^{n+1} beta(C,C)* + alpha_n(C), in bits."""
    base = C.complex
    return (C.eta + beta_bit(base, base) + alpha_bit(base, n)) % 2


def dual(C: SignedComplex, n: int) -> SignedComplex:
    return SignedComplex(dual_complex(C.complex, n), dual_eta_bit(C, n))


def dual_map(f: ChainMap, n: int) -> ChainMap:
    """f^{n-*}: dual(D, n) -> dual(C, n), degreewise involution-transpose."""
    comps = [f.component(n - r).star() for r in range(n + 1)]
    return ChainMap(dual_complex(f.target, n), dual_complex(f.source, n), tuple(comps))


def t_flip(phi: Matrix, p: int, q: int) -> Matrix:
    """Duality isomorphism T: Hom(C^p, D_q) -> Hom(D^q, C_p); phi -> (-1)^{pq} phi^*."""
    m = phi.star()
    if (p * q) % 2:
        m = -m
    return m


def cone_complex(f: ChainMap) -> BasedComplex:
    """Mapping cone: C(f)_r = D_r + C_{r-1}, d = [[d_D, (-1)^{r+1} f],[0, d_C]]."""
    C, D = f.source, f.target
    R = f.ring
    top = max(D.top, C.top + 1)
    dims = tuple(D.dim(r) + C.dim(r - 1) for r in range(top + 1))
    d = [Matrix.zero(R, 0, dims[0])]
    for r in range(1, top + 1):
        fpart = f.component(r - 1)
        if (r + 1) % 2:
            fpart = -fpart
        d.append(Matrix.block(R, [
            [D.diff(r), fpart],
            [Matrix.zero(R, C.dim(r - 2), D.dim(r)), C.diff(r - 1)],
        ]))
    return BasedComplex(R, dims, tuple(d))


def cone(f: ChainMap, C: SignedComplex, D: SignedComplex) -> SignedComplex:
    """Signed mapping cone with eta = eta of the signed sum D + SC."""
    if C.complex != f.source or D.complex != f.target:
        raise InvalidComplex("signed complexes do not match the map's endpoints")
    eta = direct_sum_eta_bit(D, suspend(C))
    return SignedComplex(cone_complex(f), eta)


# ---------------------------------------------------------------------------
# tensor products
# ---------------------------------------------------------------------------


def tensor_with_embeddings(C: BasedComplex, D: BasedComplex):
    """(C tensor D, combined ring, rename map for D's variables).

    Basis in degree r: blocks C_s tensor D_{r-s} for ascending s, each block
    in row-major pair order (C-index outer, D-index inner).  Differential:
    x tensor d(y) + (-1)^{r-s} d(x) tensor y on the block of C_s.
    """
    R, rename2 = combine_rings(C.ring, D.ring)
    CL = C.map_ring(R)
    DL = D.map_ring(R, rename2)
    top = CL.top + DL.top
    dims = []
    for r in range(top + 1):
        dims.append(sum(CL.dim(s) * DL.dim(r - s) for s in range(CL.top + 1)))
    d = [Matrix.zero(R, 0, dims[0])]
    for r in range(1, top + 1):
        src_blocks = [s for s in range(CL.top + 1) if CL.dim(s) * DL.dim(r - s)]
        tgt_blocks = [s for s in range(CL.top + 1) if CL.dim(s) * DL.dim(r - 1 - s)]
        grid = []
        for st in tgt_blocks:
            row = []
            for ss in src_blocks:
                if st == ss:
                    blk = Matrix.identity(R, CL.dim(ss)).kron(DL.diff(r - ss))
                elif st == ss - 1:
                    blk = CL.diff(ss).kron(Matrix.identity(R, DL.dim(r - ss)))
                    if (r - ss) % 2:
                        blk = -blk
                else:
                    blk = Matrix.zero(R, CL.dim(st) * DL.dim(r - 1 - st), CL.dim(ss) * DL.dim(r - ss))
                row.append(blk)
            grid.append(row)
        if not tgt_blocks or not src_blocks:
            d.append(Matrix.zero(R, dims[r - 1], dims[r]))
        else:
            d.append(Matrix.block(R, grid))
    return BasedComplex(R, tuple(dims), tuple(d)), R, rename2


def tensor_complex(C: BasedComplex, D: BasedComplex) -> BasedComplex:
    T, _, _ = tensor_with_embeddings(C, D)
    return T


def tensor_index(C: BasedComplex, D: BasedComplex, r: int):
    """Flat basis enumeration of (C tensor D)_r as triples (s, i, j)."""
    out = []
    for s in range(C.top + 1):
        for i in range(C.dim(s)):
            for j in range(D.dim(r - s)):
                out.append((s, i, j))
    return out


# ---------------------------------------------------------------------------
# block rearrangement isomorphisms
# ---------------------------------------------------------------------------


def _permutation_matrix(R: RingSpec, images, source_dim: int, target_dim: int) -> Matrix:
    data = [[rg.zero(R)] * source_dim for _ in range(target_dim)]
    for src, tgt in enumerate(images):
        data[tgt][src] = rg.one(R)
    return Matrix(R, target_dim, source_dim, tuple(tuple(row) for row in data))


def swap_map(C: BasedComplex, D: BasedComplex) -> ChainMap:
    """The rearrangement [[0,1],[1,0]]: C + D -> D + C."""
    src = direct_sum_complex(C, D)
    tgt = direct_sum_complex(D, C)
    comps = []
    for r in range(max(src.top, tgt.top) + 1):
        c, dd = C.dim(r), D.dim(r)
        images = [dd + i for i in range(c)] + list(range(dd))
        comps.append(_permutation_matrix(C.ring, images, c + dd, c + dd))
    return ChainMap(src, tgt, tuple(comps))


def tensor_split_left(parts, D: BasedComplex):
    """Chain iso ((+ parts) tensor D) -> + (part_i tensor D), a permutation."""
    whole = parts[0]
    for p in parts[1:]:
        whole = direct_sum_complex(whole, p)
    src, R, rename2 = tensor_with_embeddings(whole, D)
    pieces = [tensor_with_embeddings(p, D)[0] for p in parts]
    tgt = pieces[0]
    for p in pieces[1:]:
        tgt = direct_sum_complex(tgt, p)
    offsets = []
    acc = 0
    for p in parts:
        offsets.append(acc)
        acc += 1
    comps = []
    for r in range(max(src.top, tgt.top) + 1):
        piece_offsets = []
        acc = 0
        for piece in pieces:
            piece_offsets.append(acc)
            acc += piece.dim(r)
        images = []
        for s in range(whole.top + 1):
            for i in range(whole.dim(s)):
                which, local = _locate(parts, s, i)
                for j in range(D.dim(r - s)):
                    pos = piece_offsets[which] + _tensor_pos(parts[which], D, r, s, local, j)
                    images.append(pos)
        comps.append(_permutation_matrix(R, images, src.dim(r), tgt.dim(r)))
    return ChainMap(src, tgt, tuple(comps)), pieces


def tensor_split_right(C: BasedComplex, parts):
    """Chain iso (C tensor (+ parts)) -> + (C tensor part_j), a permutation."""
    whole = parts[0]
    for p in parts[1:]:
        whole = direct_sum_complex(whole, p)
    src, R, rename2 = tensor_with_embeddings(C, whole)
    pieces = [tensor_with_embeddings(C, p)[0] for p in parts]
    tgt = pieces[0]
    for p in pieces[1:]:
        tgt = direct_sum_complex(tgt, p)
    comps = []
    for r in range(max(src.top, tgt.top) + 1):
        piece_offsets = []
        acc = 0
        for piece in pieces:
            piece_offsets.append(acc)
            acc += piece.dim(r)
        images = []
        for s in range(C.top + 1):
            for i in range(C.dim(s)):
                for j in range(whole.dim(r - s)):
                    which, local = _locate(parts, r - s, j)
                    pos = piece_offsets[which] + _tensor_pos(C, parts[which], r, s, i, local)
                    images.append(pos)
        comps.append(_permutation_matrix(R, images, src.dim(r), tgt.dim(r)))
    return ChainMap(src, tgt, tuple(comps)), pieces


def _locate(parts, degree: int, index: int):
    for which, p in enumerate(parts):
        if index < p.dim(degree):
            return which, index
        index -= p.dim(degree)
    raise IndexError("basis index out of range")


def _tensor_pos(X: BasedComplex, Y: BasedComplex, r: int, s: int, i: int, j: int) -> int:
    pos = 0
    for ss in range(s):
        pos += X.dim(ss) * Y.dim(r - ss)
    return pos + i * Y.dim(r - s) + j
