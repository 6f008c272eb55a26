"""K1 of the supported rings via determinants, and its Tate-cohomology reduction.

Over every ring in the tower SK1 vanishes, so the determinant identifies K1
with the unit group.  Torsion values are written additively in formulas but
the group law here is multiplication of units; tau(a) + tau(b) is realized as
the product of the underlying units.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import NotAUnit, NotInKernel, UnsupportedRing
from . import rings as rg
from .matrix import Matrix
from .rings import RingSpec, Scalar


@dataclass(frozen=True)
class K1Element:
    """A torsion value, represented by the unit det(f) of the ring."""

    ring: RingSpec
    unit: Scalar

    def __post_init__(self):
        if self.unit.ring != self.ring:
            raise ValueError("unit lives in the wrong ring")
        if not self.unit.is_unit:
            raise NotAUnit(f"{self.unit} is not a unit of {self.ring!r}")

    def __add__(self, other: "K1Element") -> "K1Element":
        if other.ring != self.ring:
            raise ValueError("K1 elements over different rings")
        return K1Element(self.ring, self.unit * other.unit)

    def __neg__(self) -> "K1Element":
        return K1Element(self.ring, Scalar(self.ring, rg.unit_inverse(self.ring, self.unit.value)))

    def __sub__(self, other: "K1Element") -> "K1Element":
        return self + (-other)

    def times(self, n: int) -> "K1Element":
        """n-fold sum (unit power); n may be negative."""
        u = self.unit.value
        if n < 0:
            u = rg.unit_inverse(self.ring, u)
            n = -n
        acc = rg.one(self.ring)
        for _ in range(n):
            acc = rg.mul(self.ring, acc, u)
        return K1Element(self.ring, Scalar(self.ring, acc))

    @property
    def is_trivial(self) -> bool:
        return rg.eq(self.ring, self.unit.value, rg.one(self.ring))

    def map_ring(self, dst: RingSpec, rename: dict | None = None) -> "K1Element":
        return K1Element(dst, Scalar(dst, rg.embed(self.ring, dst, self.unit.value, rename)))

    def __str__(self):
        return str(self.unit)

    def __repr__(self):
        return f"tau({self})"


def k1_one(R: RingSpec) -> K1Element:
    return K1Element(R, Scalar(R, rg.one(R)))


def k1_minus_one(R: RingSpec) -> K1Element:
    return K1Element(R, Scalar(R, rg.from_int(R, -1)))


def k1_of_unit(R: RingSpec, value) -> K1Element:
    return K1Element(R, Scalar(R, value))


def k1_sign(R: RingSpec, bit: int) -> K1Element:
    """The subgroup generated by tau(-1), encoded by one bit."""
    return k1_minus_one(R) if bit % 2 else k1_one(R)


def det(m: Matrix) -> K1Element:
    """Determinant of an invertible square matrix as a K1 element."""
    if m.rows != m.cols:
        raise NotAUnit(f"{m.rows}x{m.cols} matrix is not square")
    d = m.det()
    if not rg.is_unit(m.ring, d):
        raise NotAUnit(
            f"determinant {rg.to_str(m.ring, d)} is not a unit of {m.ring!r}"
        )
    return K1Element(m.ring, Scalar(m.ring, d))


def k1_star(x: K1Element) -> K1Element:
    """The involution on K1 induced by the ring involution: tau(f)* = tau(f*)."""
    return K1Element(x.ring, x.unit.star())


def augment_sign(x: K1Element) -> K1Element:
    """Substitute 1 for every Laurent variable; lands in K1(Z) = {tau(1), tau(-1)}."""
    R = x.ring
    if not (R.is_laurent and R.base == rg.ZZ):
        raise UnsupportedRing("augment_sign needs a Laurent ring over the integers")
    value = rg.substitute_ones(R, x.unit.value)
    return K1Element(rg.ZZ, Scalar(rg.ZZ, value))


@dataclass(frozen=True)
class TateClass:
    """A class in H^n(Z_2; K1(R)) with its canonical coset representative."""

    ring: RingSpec
    parity: int
    representative: Scalar

    @property
    def is_trivial(self) -> bool:
        return rg.eq(self.ring, self.representative.value, rg.one(self.ring))

    def __eq__(self, other):
        return (
            isinstance(other, TateClass)
            and self.ring == other.ring
            and self.parity == other.parity
            and self.representative.value == other.representative.value
        )

    def __str__(self):
        return f"class({self.representative}) in H^{'odd' if self.parity else 'even'}"

    def __repr__(self):
        return str(self)


def _squarefree_sign(q: Fraction):
    """Canonical representative of q in Q^x / squares: sign * squarefree part."""
    n = q.numerator * q.denominator
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    f = 2
    while f * f <= n:
        e = 0
        while n % f == 0:
            n //= f
            e += 1
        if e % 2:
            out *= f
        f += 1
    out *= n
    return Fraction(sign * out)


def _field_square_class(R: RingSpec, a):
    """Canonical representative of a in F_p^x / squares."""
    p = R.p
    if p == 2:
        return 1
    if pow(a, (p - 1) // 2, p) == 1:
        return 1
    nonres = next(x for x in range(2, p) if pow(x, (p - 1) // 2, p) != 1)
    return nonres


def tate_reduce(x: K1Element, n: int) -> TateClass:
    """Class of x in ker(1 - (-1)^n *) / im(1 + (-1)^n *), canonical representative.

    Normal forms: over ZZ both parities give {1, -1}; over Laurent rings with
    integer base the odd-parity representative reduces every exponent mod 2
    while even parity requires exponent zero; over QQ/F_p even parity is units
    modulo squares and odd parity is {1, -1}.
    """
    R = x.ring
    u = x.unit.value
    parity = n % 2
    if parity:
        # kernel: u * u^* = 1 ; image: v / v^*
        prod = rg.mul(R, u, rg.involve(R, u))
        if not rg.eq(R, prod, rg.one(R)):
            raise NotInKernel(
                f"{x} fails the odd-parity kernel condition (u*u^* = {rg.to_str(R, prod)})"
            )
    else:
        # kernel: u = u^* ; image: v * v^*
        if not rg.eq(R, u, rg.involve(R, u)):
            raise NotInKernel(f"{x} fails the even-parity kernel condition (u != u^*)")

    if R.kind == rg.INTEGERS:
        rep = u
    elif R.kind == rg.RATIONALS:
        if parity:
            rep = u  # kernel forces u in {1, -1}
        else:
            rep = _squarefree_sign(u)
    elif R.kind == rg.PRIME_FIELD:
        if parity:
            rep = u  # kernel forces u^2 = 1
        else:
            rep = _field_square_class(R, u)
    elif R.is_laurent:
        (exps, coeff), = u
        if parity:
            rep = rg.monomial(R, tuple(e % 2 for e in exps), _tate_base_rep(R.base, coeff, parity))
        else:
            # even-parity kernel already forces every exponent to vanish
            rep = rg.monomial(R, exps, _tate_base_rep(R.base, coeff, parity))
    else:  # pragma: no cover
        raise UnsupportedRing(f"tate_reduce over {R!r}")
    return TateClass(R, parity, Scalar(R, rep))


def _tate_base_rep(B: RingSpec, coeff, parity):
    if B.kind == rg.INTEGERS:
        return coeff
    if B.kind == rg.RATIONALS:
        return coeff if parity else _squarefree_sign(coeff)
    if B.kind == rg.PRIME_FIELD:
        return coeff if parity else _field_square_class(B, coeff)
    raise UnsupportedRing(f"tate_reduce base {B!r}")
