"""Exact scalar arithmetic over the supported ring tower.

Supported rings: the integers, the rationals, prime fields F_p, and Laurent
polynomial rings in finitely many variables over one of those three.  Every
element is kept in a canonical form so that equality is literal equality of
the stored value:

* integers          -- python int
* rationals         -- Fraction in lowest terms, positive denominator
* prime field F_p   -- int in [0, p)
* Laurent elements  -- tuple of (exponent-vector, coeff) pairs, coeff nonzero,
                       sorted by exponent vector

The involution fixes the base rings elementwise and inverts every Laurent
variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import IncompatibleRings, NotAUnit, UnsupportedRing

INTEGERS = "integers"
RATIONALS = "rationals"
PRIME_FIELD = "prime_field"
LAURENT = "laurent"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    """A ring from the supported tower, with its involution.

    ``kind`` is one of "integers", "rationals", "prime_field", "laurent".
    Laurent rings carry a base RingSpec (never itself Laurent) and an ordered
    tuple of distinct variable names.
    """

    kind: str
    p: int | None = None
    base: "RingSpec | None" = None
    vars: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in (INTEGERS, RATIONALS, PRIME_FIELD, LAURENT):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == PRIME_FIELD:
            if self.p is None or not _is_prime(self.p):
                raise ValueError(f"prime_field needs a prime, got {self.p!r}")
        if self.kind == LAURENT:
            if self.base is None or self.base.kind == LAURENT:
                raise ValueError("laurent base must be integers/rationals/prime_field")
            if not self.vars:
                raise ValueError("laurent ring needs at least one variable")
            if len(set(self.vars)) != len(self.vars) or any(not v for v in self.vars):
                raise ValueError("laurent variables must be distinct and nonempty")

    @property
    def is_field(self) -> bool:
        return self.kind in (RATIONALS, PRIME_FIELD)

    @property
    def is_laurent(self) -> bool:
        return self.kind == LAURENT

    def __repr__(self):
        if self.kind == INTEGERS:
            return "ZZ"
        if self.kind == RATIONALS:
            return "QQ"
        if self.kind == PRIME_FIELD:
            return f"GF({self.p})"
        return f"{self.base!r}[{','.join(v + '^±' for v in self.vars)}]"

    def to_json(self):
        if self.kind == PRIME_FIELD:
            return {"kind": self.kind, "p": self.p}
        if self.kind == LAURENT:
            return {"kind": self.kind, "base": self.base.to_json(), "vars": list(self.vars)}
        return {"kind": self.kind}

    @staticmethod
    def from_json(obj) -> "RingSpec":
        kind = obj["kind"]
        if kind == PRIME_FIELD:
            return RingSpec(PRIME_FIELD, p=int(obj["p"]))
        if kind == LAURENT:
            return RingSpec(
                LAURENT,
                base=RingSpec.from_json(obj["base"]),
                vars=tuple(obj["vars"]),
            )
        return RingSpec(kind)


ZZ = RingSpec(INTEGERS)
QQ = RingSpec(RATIONALS)


def GF(p: int) -> RingSpec:
    return RingSpec(PRIME_FIELD, p=p)


def laurent_ring(base: RingSpec, vars: tuple[str, ...] | list[str]) -> RingSpec:
    return RingSpec(LAURENT, base=base, vars=tuple(vars))


# ---------------------------------------------------------------------------
# raw element arithmetic (values in canonical form, dispatched on ring.kind)
# ---------------------------------------------------------------------------


def zero(R: RingSpec):
    if R.kind == LAURENT:
        return ()
    if R.kind == RATIONALS:
        return Fraction(0)
    return 0


def one(R: RingSpec):
    return from_int(R, 1)


def from_int(R: RingSpec, n: int):
    if R.kind == INTEGERS:
        return int(n)
    if R.kind == RATIONALS:
        return Fraction(n)
    if R.kind == PRIME_FIELD:
        return int(n) % R.p
    c = from_int(R.base, n)
    if is_zero(R.base, c):
        return ()
    return (((0,) * len(R.vars), c),)


def from_base(R: RingSpec, c):
    """Embed a base-ring element as a constant Laurent element."""
    if is_zero(R.base, c):
        return ()
    return (((0,) * len(R.vars), c),)


def monomial(R: RingSpec, exps, coeff=None):
    """coeff * prod(var_i ^ exps_i) over a Laurent ring."""
    if coeff is None:
        coeff = one(R.base)
    if is_zero(R.base, coeff):
        return ()
    return ((tuple(exps), coeff),)


def is_zero(R: RingSpec, a) -> bool:
    if R.kind == LAURENT:
        return a == ()
    return a == 0


def eq(R: RingSpec, a, b) -> bool:
    return a == b


def add(R: RingSpec, a, b):
    k = R.kind
    if k == INTEGERS or k == RATIONALS:
        return a + b
    if k == PRIME_FIELD:
        return (a + b) % R.p
    terms = dict(a)
    B = R.base
    for e, c in b:
        if e in terms:
            s = add(B, terms[e], c)
            if is_zero(B, s):
                del terms[e]
            else:
                terms[e] = s
        else:
            terms[e] = c
    return tuple(sorted(terms.items()))


def neg(R: RingSpec, a):
    k = R.kind
    if k == INTEGERS or k == RATIONALS:
        return -a
    if k == PRIME_FIELD:
        return (-a) % R.p
    B = R.base
    return tuple((e, neg(B, c)) for e, c in a)


def sub(R: RingSpec, a, b):
    return add(R, a, neg(R, b))


def mul(R: RingSpec, a, b):
    k = R.kind
    if k == INTEGERS or k == RATIONALS:
        return a * b
    if k == PRIME_FIELD:
        return (a * b) % R.p
    if a == () or b == ():
        return ()
    B = R.base
    terms: dict = {}
    for e1, c1 in a:
        for e2, c2 in b:
            e = tuple(x + y for x, y in zip(e1, e2))
            c = mul(B, c1, c2)
            if e in terms:
                c = add(B, terms[e], c)
                if is_zero(B, c):
                    del terms[e]
                    continue
            if not is_zero(B, c):
                terms[e] = c
    return tuple(sorted(terms.items()))


def involve(R: RingSpec, a):
    """The ring involution: identity on base rings, var -> var^-1 on Laurent rings."""
    if R.kind != LAURENT:
        return a
    B = R.base
    return tuple(sorted(((tuple(-x for x in e), involve(B, c)) for e, c in a)))


def is_unit(R: RingSpec, a) -> bool:
    k = R.kind
    if k == INTEGERS:
        return a in (1, -1)
    if k == RATIONALS or k == PRIME_FIELD:
        return not is_zero(R, a)
    return len(a) == 1 and is_unit(R.base, a[0][1])


def unit_inverse(R: RingSpec, a):
    if not is_unit(R, a):
        raise NotAUnit(f"{to_str(R, a)} is not a unit of {R!r}")
    k = R.kind
    if k == INTEGERS:
        return a
    if k == RATIONALS:
        return 1 / a
    if k == PRIME_FIELD:
        return pow(a, R.p - 2, R.p)
    (e, c), = a
    return ((tuple(-x for x in e), unit_inverse(R.base, c)),)


def exact_div(R: RingSpec, a, b):
    """a / b when the division is exact in R; used by fraction-free elimination."""
    k = R.kind
    if k == INTEGERS:
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError(f"inexact integer division {a}/{b}")
        return q
    if k == RATIONALS:
        return a / b
    if k == PRIME_FIELD:
        return (a * pow(b, R.p - 2, R.p)) % R.p
    return _laurent_exact_div(R, a, b)


def _laurent_exact_div(R: RingSpec, a, b):
    """Exact division of Laurent elements (the quotient must exist in R)."""
    if b == ():
        raise ZeroDivisionError("laurent division by zero")
    if a == ():
        return ()
    B = R.base
    rem = dict(a)
    lead_b, cb = max(b)
    quo: dict = {}
    guard = len(a) * max(1, len(b)) * 4 + 16
    while rem:
        if guard == 0:
            raise ArithmeticError("inexact laurent division")
        guard -= 1
        lead_r = max(rem)
        cr = rem[lead_r]
        e = tuple(x - y for x, y in zip(lead_r, lead_b))
        c = _base_exact_div(B, cr, cb)
        quo[e] = add(B, quo.get(e, zero(B)), c)
        if is_zero(B, quo[e]):
            del quo[e]
        for eb, cbi in b:
            ee = tuple(x + y for x, y in zip(e, eb))
            s = sub(B, rem.get(ee, zero(B)), mul(B, c, cbi))
            if is_zero(B, s):
                rem.pop(ee, None)
            else:
                rem[ee] = s
    return tuple(sorted(quo.items()))


def _base_exact_div(B: RingSpec, a, b):
    if B.kind == INTEGERS:
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError("inexact laurent division (coefficient)")
        return q
    return exact_div(B, a, b)


def substitute_ones(R: RingSpec, a):
    """Evaluate a Laurent element at var = 1 for every variable (lands in the base)."""
    if R.kind != LAURENT:
        return a
    B = R.base
    total = zero(B)
    for _, c in a:
        total = add(B, total, c)
    return total


# ---------------------------------------------------------------------------
# text syntax
# ---------------------------------------------------------------------------


def _base_coeff_str(B: RingSpec, c) -> str:
    return str(c)


def to_str(R: RingSpec, a) -> str:
    """Canonical text form; Laurent terms in descending exponent order, '^1' omitted."""
    k = R.kind
    if k != LAURENT:
        return str(a)
    if a == ():
        return "0"
    B = R.base
    parts = []
    for e, c in sorted(a, reverse=True):
        factors = [f"{v}^{x}" if x != 1 else v for v, x in zip(R.vars, e) if x != 0]
        if not factors:
            parts.append(_base_coeff_str(B, c))
        elif eq(B, c, one(B)):
            parts.append("*".join(factors))
        elif eq(B, c, neg(B, one(B))):
            parts.append("-" + "*".join(factors))
        else:
            parts.append("*".join([_base_coeff_str(B, c)] + factors))
    return " + ".join(parts)


def _parse_base(B: RingSpec, s: str):
    s = s.strip()
    if B.kind == INTEGERS:
        return int(s)
    if B.kind == RATIONALS:
        return Fraction(s)
    if B.kind == PRIME_FIELD:
        if "/" in s:
            num, den = s.split("/")
            return mul(B, int(num) % B.p, unit_inverse(B, int(den) % B.p))
        return int(s) % B.p
    raise UnsupportedRing(f"cannot parse base {B!r}")


def parse(R: RingSpec, s: str):
    """Parse the scalar text syntax: '-12', '3/4', '5', '2*t^-3*s^1 + 1'."""
    s = s.strip()
    if R.kind != LAURENT:
        return _parse_base(R, s)
    B = R.base
    nvars = len(R.vars)
    var_index = {v: i for i, v in enumerate(R.vars)}
    s = s.replace("-", "+-")
    total = zero(R)
    for chunk in s.split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        negate = False
        while chunk.startswith("-"):
            negate = not negate
            chunk = chunk[1:].strip()
        coeff = one(B)
        exps = [0] * nvars
        for factor in chunk.split("*"):
            factor = factor.strip()
            if not factor:
                continue
            name, _, power = factor.partition("^")
            name = name.strip()
            if name in var_index:
                exps[var_index[name]] += int(power) if power else 1
            else:
                coeff = mul(B, coeff, _parse_base(B, factor))
        if negate:
            coeff = neg(B, coeff)
        total = add(R, total, monomial(R, exps, coeff))
    return total


# ---------------------------------------------------------------------------
# ring embeddings / combination
# ---------------------------------------------------------------------------


def embeds_into(src: RingSpec, dst: RingSpec) -> bool:
    if src == dst:
        return True
    if dst.kind == LAURENT:
        if src.kind != LAURENT:
            return src == dst.base
        return src.base == dst.base and set(src.vars) <= set(dst.vars)
    return False


def embed(src: RingSpec, dst: RingSpec, a, rename: dict | None = None):
    """Map a value of ``src`` into ``dst``: inclusions within the tower,
    base change Z -> Q / Z -> F_p, and optional variable renaming for
    Laurent sources."""
    if src == dst and not rename:
        return a
    if src == ZZ and dst.kind == RATIONALS:
        return Fraction(a)
    if src == ZZ and dst.kind == PRIME_FIELD:
        return a % dst.p
    if dst.kind != LAURENT:
        raise IncompatibleRings(f"no embedding {src!r} -> {dst!r}")
    if src.kind != LAURENT:
        if src != dst.base:
            raise IncompatibleRings(f"no embedding {src!r} -> {dst!r}")
        return from_base(dst, a)
    if src.base != dst.base:
        raise IncompatibleRings(f"no embedding {src!r} -> {dst!r}")
    rename = rename or {}
    pos = []
    for v in src.vars:
        name = rename.get(v, v)
        if name not in dst.vars:
            raise IncompatibleRings(f"variable {name!r} missing from {dst!r}")
        pos.append(dst.vars.index(name))
    n = len(dst.vars)
    out = zero(dst)
    for e, c in a:
        ee = [0] * n
        for x, j in zip(e, pos):
            ee[j] += x
        out = add(dst, out, monomial(dst, ee, c))
    return out


_RENAME_POOL = "stuvwxyzabcdefghijklmnopqr"


def combine_rings(R1: RingSpec, R2: RingSpec):
    """Tensor-combination of two rings within the tower.

    Returns (R, rename2) where values of R1 embed via embed(R1, R, .) and
    values of R2 via embed(R2, R, ., rename2).  Colliding variable names of
    the second factor are renamed to the first unused single letter.
    """
    if R1 == ZZ:
        return R2, {}
    if R2 == ZZ:
        return R1, {}
    if R1 == R2 and not R1.is_laurent:
        return R1, {}
    if R1.is_laurent and R2.is_laurent and R1.base == R2.base == ZZ:
        used = set(R1.vars)
        rename2 = {}
        new_vars = list(R1.vars)
        for v in R2.vars:
            if v not in used:
                rename2[v] = v
                used.add(v)
                new_vars.append(v)
                continue
            for cand in _RENAME_POOL:
                if cand not in used:
                    rename2[v] = cand
                    used.add(cand)
                    new_vars.append(cand)
                    break
            else:
                raise IncompatibleRings("ran out of rename letters")
        return laurent_ring(ZZ, new_vars), rename2
    if R1.is_laurent and R2 == R1.base:
        return R1, {}
    if R2.is_laurent and R1 == R2.base:
        return R2, {}
    raise IncompatibleRings(f"cannot combine {R1!r} and {R2!r}")


def extend_with_variable(R: RingSpec, var: str):
    """R -> R[var, var^-1] for R = ZZ or Laurent over ZZ (mapping torus base)."""
    if R == ZZ:
        return laurent_ring(ZZ, (var,))
    if R.is_laurent and R.base == ZZ:
        if var in R.vars:
            raise IncompatibleRings(f"variable {var!r} already present in {R!r}")
        return laurent_ring(ZZ, R.vars + (var,))
    raise IncompatibleRings(f"cannot extend {R!r} by a mapping-torus variable")


# ---------------------------------------------------------------------------
# Scalar wrapper (public canonical-form element)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scalar:
    """A ring element in canonical form; equality is representation equality."""

    ring: RingSpec
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", _canonicalize(self.ring, self.value))

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.ring != self.ring:
                raise IncompatibleRings(f"{self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, int):
            return Scalar(self.ring, from_int(self.ring, other))
        raise TypeError(f"cannot coerce {other!r}")

    def __add__(self, other):
        o = self._coerce(other)
        return Scalar(self.ring, add(self.ring, self.value, o.value))

    def __sub__(self, other):
        o = self._coerce(other)
        return Scalar(self.ring, sub(self.ring, self.value, o.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return Scalar(self.ring, mul(self.ring, self.value, o.value))

    def __neg__(self):
        return Scalar(self.ring, neg(self.ring, self.value))

    def star(self) -> "Scalar":
        return Scalar(self.ring, involve(self.ring, self.value))

    @property
    def is_zero(self) -> bool:
        return is_zero(self.ring, self.value)

    @property
    def is_unit(self) -> bool:
        return is_unit(self.ring, self.value)

    def __str__(self):
        return to_str(self.ring, self.value)

    def __repr__(self):
        return f"Scalar({self.ring!r}, {self})"


def _canonicalize(R: RingSpec, v):
    if isinstance(v, Scalar):
        v = v.value
    if isinstance(v, str):
        return parse(R, v)
    if R.kind == INTEGERS:
        if isinstance(v, Fraction):
            if v.denominator != 1:
                raise ValueError(f"{v} is not an integer")
            return int(v)
        return int(v)
    if R.kind == RATIONALS:
        return Fraction(v)
    if R.kind == PRIME_FIELD:
        return int(v) % R.p
    if isinstance(v, int):
        return from_int(R, v)
    return tuple(sorted((tuple(e), c) for e, c in v if not is_zero(R.base, c)))


def scalar(R: RingSpec, v) -> Scalar:
    return Scalar(R, v)
