"""Chain contractions and the absolute torsion of contractible complexes,
isomorphism families, short exact sequences and chain equivalences.

Sign conventions fixed here:

* a contraction satisfies d Gamma + Gamma d = 1;
* homotopy-equivalence data (f, g, h, k) satisfies 1 - gf = dh + hd and
  1 - fg = dk + kd;
* the contraction of the cone of an equivalence is assembled as
  [[k, (-1)^r W],[(-1)^r g, h']] with h' = gkf + h - gfh the side-condition
  replacement of h and W = k(kf - fh) the explicit null-homotopy of the
  residual; the identity d Gamma + Gamma d = 1 is re-verified on every call.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chains import (
    BasedComplex,
    ChainMap,
    SignedComplex,
    cone,
    cone_complex,
    direct_sum,
    direct_sum_complex,
    dual_complex,
    identity_map,
)
from .errors import ConstructionFailed, InvalidComplex, NotContractible, UnsupportedRing
from .exactring import rings as rg
from .exactring.k1 import K1Element, det, k1_sign
from .exactring.matrix import Matrix
from .exactring.smith import homology_obstruction, solve, supports_smith


@dataclass(frozen=True)
class Contraction:
    """Gamma with d Gamma + Gamma d = 1; gamma[r]: dims[r] -> dims[r+1]."""

    complex: BasedComplex
    gamma: tuple

    def __post_init__(self):
        C = self.complex
        if len(self.gamma) != C.top + 1:
            raise InvalidComplex("need one contraction component per degree")
        for r, m in enumerate(self.gamma):
            if m.rows != C.dim(r + 1) or m.cols != C.dim(r):
                raise InvalidComplex(f"contraction component in degree {r} has the wrong shape")
        for r in range(C.top + 1):
            have = C.diff(r + 1) * self.component(r) + self.component(r - 1) * C.diff(r)
            if not (have - Matrix.identity(C.ring, C.dim(r))).is_zero():
                raise InvalidComplex(f"d Gamma + Gamma d != 1 in degree {r}")

    def component(self, r: int) -> Matrix:
        if 0 <= r < len(self.gamma):
            return self.gamma[r]
        return Matrix.zero(self.complex.ring, self.complex.dim(r + 1), self.complex.dim(r))


@dataclass(frozen=True)
class HomotopyEquivalenceData:
    """A certified chain equivalence f with inverse g and homotopies h, k."""

    f: ChainMap
    g: ChainMap
    h: tuple
    k: tuple

    def __post_init__(self):
        C, D = self.f.source, self.f.target
        if self.g.source != D or self.g.target != C:
            raise InvalidComplex("g must run opposite to f")
        _check_homotopy(C, self.h, identity_map(C), self.g.compose(self.f))
        _check_homotopy(D, self.k, identity_map(D), self.f.compose(self.g))

    def h_comp(self, r: int) -> Matrix:
        return _comp(self.h, self.f.source, r)

    def k_comp(self, r: int) -> Matrix:
        return _comp(self.k, self.f.target, r)


def _comp(family, C: BasedComplex, r: int) -> Matrix:
    if 0 <= r < len(family):
        return family[r]
    return Matrix.zero(C.ring, C.dim(r + 1), C.dim(r))


def _check_homotopy(C: BasedComplex, h, one: ChainMap, gf: ChainMap):
    if len(h) != C.top + 1:
        raise InvalidComplex("homotopy family needs one component per degree")
    for r, m in enumerate(h):
        if m.rows != C.dim(r + 1) or m.cols != C.dim(r):
            raise InvalidComplex(f"homotopy component in degree {r} has the wrong shape")
    for r in range(C.top + 1):
        want = one.component(r) - gf.component(r)
        have = C.diff(r + 1) * _comp(h, C, r) + _comp(h, C, r - 1) * C.diff(r)
        if not (want - have).is_zero():
            raise InvalidComplex(f"homotopy identity 1 - gf = dh + hd fails in degree {r}")


def data_for_iso(f: ChainMap) -> HomotopyEquivalenceData:
    """Equivalence data of a chain isomorphism: inverse and zero homotopies."""
    g = f.degreewise_inverse()
    C, D = f.source, f.target
    h = tuple(Matrix.zero(C.ring, C.dim(r + 1), C.dim(r)) for r in range(C.top + 1))
    k = tuple(Matrix.zero(D.ring, D.dim(r + 1), D.dim(r)) for r in range(D.top + 1))
    return HomotopyEquivalenceData(f, g, h, k)


def data_zero_map(gamma_src: Contraction, gamma_tgt: Contraction) -> HomotopyEquivalenceData:
    """The zero map between contractible complexes, certified by contractions."""
    C, D = gamma_src.complex, gamma_tgt.complex
    f = ChainMap.build(C, D, [None] * (max(C.top, D.top) + 1))
    g = ChainMap.build(D, C, [None] * (max(C.top, D.top) + 1))
    h = tuple(gamma_src.component(r) for r in range(C.top + 1))
    k = tuple(gamma_tgt.component(r) for r in range(D.top + 1))
    return HomotopyEquivalenceData(f, g, h, k)


def data_compose(e2: HomotopyEquivalenceData, e1: HomotopyEquivalenceData) -> HomotopyEquivalenceData:
    """Data for f2 o f1 from data for f1: A -> B and f2: B -> C."""
    f = e2.f.compose(e1.f)
    g = e1.g.compose(e2.g)
    A = e1.f.source
    C = e2.f.target
    h = tuple(
        e1.h_comp(r) + e1.g.component(r + 1) * e2.h_comp(r) * e1.f.component(r)
        for r in range(A.top + 1)
    )
    k = tuple(
        e2.k_comp(r) + e2.f.component(r + 1) * e1.k_comp(r) * e2.g.component(r)
        for r in range(C.top + 1)
    )
    return HomotopyEquivalenceData(f, g, h, k)


def data_direct_sum(e1: HomotopyEquivalenceData, e2: HomotopyEquivalenceData) -> HomotopyEquivalenceData:
    A1, B1 = e1.f.source, e1.f.target
    A2, B2 = e2.f.source, e2.f.target
    src = direct_sum_complex(A1, A2)
    tgt = direct_sum_complex(B1, B2)
    R = src.ring
    top = max(src.top, tgt.top)
    f = ChainMap(src, tgt, tuple(
        Matrix.direct_sum(R, [e1.f.component(r), e2.f.component(r)]) for r in range(top + 1)
    ))
    g = ChainMap(tgt, src, tuple(
        Matrix.direct_sum(R, [e1.g.component(r), e2.g.component(r)]) for r in range(top + 1)
    ))
    h = tuple(Matrix.direct_sum(R, [e1.h_comp(r), e2.h_comp(r)]) for r in range(src.top + 1))
    k = tuple(Matrix.direct_sum(R, [e1.k_comp(r), e2.k_comp(r)]) for r in range(tgt.top + 1))
    return HomotopyEquivalenceData(f, g, h, k)


def data_homotopic(e: HomotopyEquivalenceData, f_new: ChainMap, m) -> HomotopyEquivalenceData:
    """Data for f' = f + dm + md given data for f (same g works)."""
    C = e.f.source
    h = tuple(e.h_comp(r) - e.g.component(r + 1) * _comp(m, C, r) for r in range(C.top + 1))
    D = e.f.target
    k = tuple(e.k_comp(r) - _comp(m, C, r) * e.g.component(r) for r in range(D.top + 1))
    return HomotopyEquivalenceData(f_new, e.g, h, k)


def data_conjugate(e: HomotopyEquivalenceData, p: ChainMap, q: ChainMap) -> HomotopyEquivalenceData:
    """Data for q o f o p^{-1} given chain isos p: A -> A', q: B -> B'."""
    return data_compose(data_for_iso(q), data_compose(e, data_for_iso(p.degreewise_inverse())))


# ---------------------------------------------------------------------------
# contraction transport
# ---------------------------------------------------------------------------


def contraction_direct_sum(g1: Contraction, g2: Contraction) -> Contraction:
    C = direct_sum_complex(g1.complex, g2.complex)
    R = C.ring
    gam = tuple(
        Matrix.direct_sum(R, [g1.component(r), g2.component(r)]) for r in range(C.top + 1)
    )
    return Contraction(C, gam)


def contraction_suspend(g: Contraction) -> Contraction:
    from .chains import suspend_complex

    C = suspend_complex(g.complex)
    R = C.ring
    gam = [Matrix.zero(R, C.dim(1), C.dim(0))]
    for r in range(1, C.top + 1):
        gam.append(g.component(r - 1))
    return Contraction(C, tuple(gam))


def contraction_dual(g: Contraction, n: int) -> Contraction:
    """Gamma of C^{n-*}: (-1)^{r+1} (Gamma_{n-r-1})^* out of dual degree r."""
    D = dual_complex(g.complex, n)
    gam = []
    for r in range(n + 1):
        m = g.component(n - r - 1).star()
        if (r + 1) % 2:
            m = -m
        gam.append(m)
    return Contraction(D, tuple(gam))


def contraction_conjugate(g: Contraction, u: ChainMap) -> Contraction:
    """Transport along a chain iso u: C -> C'."""
    if u.source != g.complex:
        raise InvalidComplex("conjugating contraction along a map with wrong source")
    uinv = u.degreewise_inverse()
    C = u.target
    gam = tuple(
        u.component(r + 1) * g.component(r) * uinv.component(r) for r in range(C.top + 1)
    )
    return Contraction(C, gam)


def contraction_tensor_left(g: Contraction, D: BasedComplex) -> Contraction:
    """Contraction of (C tensor D) from a contraction of C: (-1)^{|y|} Gamma x tensor y."""
    from .chains import tensor_with_embeddings

    C = g.complex
    T, R, rename2 = tensor_with_embeddings(C, D)
    CL = C.map_ring(R)
    DL = D.map_ring(R, rename2)
    gam = []
    for r in range(T.top + 1):
        grid = []
        tgt_blocks = [s for s in range(CL.top + 1) if CL.dim(s) * DL.dim(r + 1 - s)]
        src_blocks = [s for s in range(CL.top + 1) if CL.dim(s) * DL.dim(r - s)]
        for st in tgt_blocks:
            row = []
            for ss in src_blocks:
                if st == ss + 1:
                    blk = g.component(ss).map_ring(R).kron(Matrix.identity(R, DL.dim(r - ss)))
                    if (r - ss) % 2:
                        blk = -blk
                else:
                    blk = Matrix.zero(R, CL.dim(st) * DL.dim(r + 1 - st), CL.dim(ss) * DL.dim(r - ss))
                row.append(blk)
            grid.append(row)
        if not tgt_blocks or not src_blocks:
            gam.append(Matrix.zero(R, T.dim(r + 1), T.dim(r)))
        else:
            gam.append(Matrix.block(R, grid))
    return Contraction(T, tuple(gam))


# ---------------------------------------------------------------------------
# finding contractions
# ---------------------------------------------------------------------------


def find_contraction(C: BasedComplex) -> Contraction:
    """A verified contraction of an acyclic complex over a Smith-split ring."""
    if not supports_smith(C.ring):
        raise UnsupportedRing(
            f"cannot decide contractibility over {C.ring!r}; supply a certificate"
        )
    R = C.ring
    gamma = []
    prev = None  # Gamma_{r-1}
    for r in range(C.top + 1):
        pi = Matrix.identity(R, C.dim(r))
        if prev is not None:
            pi = pi - prev * C.diff(r)
        if r == C.top:
            if not pi.is_zero():
                raise NotContractible(r, _divisors(C, r))
            gamma.append(Matrix.zero(R, 0, C.dim(r)))
            break
        x = solve(C.diff(r + 1), pi)
        if x is None:
            raise NotContractible(r, _divisors(C, r))
        gamma.append(x)
        prev = x
    return Contraction(C, tuple(gamma))


def _divisors(C: BasedComplex, r: int):
    try:
        return tuple(rg.to_str(C.ring, v) for v in homology_obstruction(C.diff(r + 1), C.diff(r)))
    except ArithmeticError:  # pragma: no cover
        return ()


def is_acyclic(C: BasedComplex) -> bool:
    try:
        find_contraction(C)
        return True
    except NotContractible:
        return False


def cone_contraction_from_data(e: HomotopyEquivalenceData) -> Contraction:
    """Contraction of the cone of a certified equivalence (verified before return)."""
    f, g = e.f, e.g
    C, D = f.source, f.target
    R = C.ring
    X = cone_complex(f)

    def u(r):
        return e.k_comp(r) * f.component(r) - f.component(r + 1) * e.h_comp(r)

    def h_side(r):
        gkf = g.component(r + 1) * e.k_comp(r) * f.component(r)
        gfh = g.component(r + 1) * f.component(r + 1) * e.h_comp(r)
        return gkf + e.h_comp(r) - gfh

    def w(r):
        return e.k_comp(r + 1) * u(r)

    gam = []
    for r in range(X.top + 1):
        top_right = w(r - 1)
        bottom_left = g.component(r)
        if r % 2:
            top_right = -top_right
            bottom_left = -bottom_left
        gam.append(Matrix.block(R, [
            [e.k_comp(r), top_right],
            [bottom_left, h_side(r - 1)],
        ]))
    try:
        return Contraction(X, tuple(gam))
    except InvalidComplex as exc:
        raise ConstructionFailed(f"derived cone contraction failed verification: {exc}") from exc


# ---------------------------------------------------------------------------
# absolute torsion
# ---------------------------------------------------------------------------


def d_plus_gamma(C: BasedComplex, gamma: Contraction) -> Matrix:
    """(d + Gamma): C_odd -> C_even, odd/even degrees ascending."""
    R = C.ring
    odd = [r for r in range(1, C.top + 1, 2)]
    even = [r for r in range(0, C.top + 1, 2)]
    grid = []
    for te in even:
        row = []
        for so in odd:
            if te == so - 1:
                row.append(C.diff(so))
            elif te == so + 1:
                row.append(gamma.component(so))
            else:
                row.append(Matrix.zero(R, C.dim(te), C.dim(so)))
        grid.append(row)
    if not odd or not even:
        return Matrix.zero(R, sum(C.dim(r) for r in even), sum(C.dim(r) for r in odd))
    return Matrix.block(R, grid)


def tau_naive(C: BasedComplex, gamma: Contraction | None = None) -> K1Element:
    """tau(C) = tau(d + Gamma) without the sign eta."""
    if gamma is None:
        gamma = find_contraction(C)
    elif gamma.complex != C:
        raise InvalidComplex("contraction is for a different complex")
    return det(d_plus_gamma(C, gamma))


def tau_contractible(C: SignedComplex, gamma: Contraction | None = None) -> K1Element:
    """Absolute torsion tau(C) + eta_C of a contractible signed complex."""
    return tau_naive(C.complex, gamma) + C.eta_k1()


def tau_iso_family(fs, C: SignedComplex, D: SignedComplex) -> K1Element:
    """sum_r (-1)^r tau(f_r) - eta_C + eta_D for degreewise isomorphisms f_r.

    ``fs`` is a list of matrices or a ChainMap; the family need not commute
    with the differentials.
    """
    if isinstance(fs, ChainMap):
        fs = [fs.component(r) for r in range(max(C.complex.top, D.complex.top) + 1)]
    R = C.ring
    total = k1_sign(R, (C.eta + D.eta) % 2)
    for r, m in enumerate(fs):
        dm = det(m)
        total = total + (dm if r % 2 == 0 else -dm)
    return total


def derive_splitting(j: ChainMap) -> list:
    """Degreewise right inverse of j (over Smith-split rings)."""
    if not supports_smith(j.ring):
        raise UnsupportedRing("cannot derive a splitting over this ring; supply k")
    ks = []
    top = max(j.source.top, j.target.top)
    for r in range(top + 1):
        m = j.component(r)
        x = solve(m, Matrix.identity(j.ring, m.rows))
        if x is None:
            raise InvalidComplex(f"j is not split surjective in degree {r}")
        ks.append(x)
    return ks


def tau_ses(
    i: ChainMap,
    j: ChainMap,
    k,
    C: SignedComplex,
    Cmid: SignedComplex,
    Cquot: SignedComplex,
) -> K1Element:
    """Absolute torsion of 0 -> C -> C'' -> C' -> 0 with splitting family k.

    Computed as the torsion of the isomorphism family (i k): C_r + C'_r -> C''_r
    with the direct-sum sign on the source; independent of the choice of k.
    """
    if k is None:
        k = derive_splitting(j)
    R = C.ring
    top = max(Cmid.complex.top, C.complex.top, Cquot.complex.top)
    fs = []
    for r in range(top + 1):
        ir = i.component(r)
        kr = k[r] if r < len(k) else Matrix.zero(R, Cmid.complex.dim(r), Cquot.complex.dim(r))
        jk = j.component(r) * kr
        if not (jk - Matrix.identity(R, Cquot.complex.dim(r))).is_zero():
            raise InvalidComplex(f"jk != 1 in degree {r}")
        fs.append(Matrix.block(R, [[ir, kr]]))
    return tau_iso_family(fs, direct_sum(C, Cquot), Cmid)


def tau_equiv(
    f: ChainMap,
    C: SignedComplex,
    D: SignedComplex,
    certificate=None,
) -> K1Element:
    """Absolute torsion of a chain equivalence: tau of the signed mapping cone."""
    cone_signed = cone(f, C, D)
    gamma = _cone_contraction(f, cone_signed.complex, certificate)
    return tau_contractible(cone_signed, gamma)


def _cone_contraction(f: ChainMap, cone_cx: BasedComplex, certificate) -> Contraction:
    if isinstance(certificate, Contraction):
        if certificate.complex != cone_cx:
            raise InvalidComplex("certificate contracts a different complex")
        return certificate
    if isinstance(certificate, HomotopyEquivalenceData):
        if certificate.f.source != f.source or certificate.f.target != f.target:
            raise InvalidComplex("certificate is for a different map")
        return cone_contraction_from_data(certificate)
    if certificate is not None:
        raise TypeError(f"unsupported certificate {certificate!r}")
    if f.is_degreewise_iso():
        return cone_contraction_from_data(data_for_iso(f))
    return find_contraction(cone_cx)
