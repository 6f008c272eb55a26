"""Exception types shared across the library.

Every mathematically meaningful rejection gets its own class so callers (and
the CLI exit-code logic) can distinguish "your input is not what you claimed"
from genuine bugs.
"""


class TorsionError(Exception):
    """Base class for all mathematical rejections raised by this library."""


class NotAUnit(TorsionError):
    """A determinant (or scalar) required to be invertible is not."""


class UnsupportedRing(TorsionError):
    """The requested operation is not available over this ring."""


class NotInKernel(TorsionError):
    """A K1 element fails the kernel condition for the requested Tate parity."""


class IncompatibleRings(TorsionError):
    """Two operands live over rings that cannot be combined."""


class InvalidComplex(TorsionError):
    """Construction data violates a chain-level identity (d^2 = 0, chain map, ...)."""


class NotContractible(TorsionError):
    """A complex required to be contractible has nonzero homology."""

    def __init__(self, degree, divisors=()):
        self.degree = degree
        self.divisors = tuple(divisors)
        detail = f"homology is nonzero in degree {degree}"
        if self.divisors:
            detail += f" (elementary divisors {list(self.divisors)})"
        super().__init__(detail)


class ConstructionFailed(TorsionError):
    """An internally derived object failed its verification step."""


class NotConnected(TorsionError):
    """The symmetric complex is not connected (H_0 of the duality cone is nonzero)."""


class DimensionMismatch(TorsionError):
    """The formal dimension does not satisfy the congruence the invariant needs."""


class NonIntegralHalf(TorsionError):
    """(signature - (1+2k)*chi) is odd, so the predicted sign term is undefined."""


class UnknownEntry(TorsionError):
    """No atlas entry with the requested name/parameters."""
