"""Exact scalar/matrix arithmetic, determinant K1, and Tate reduction."""

from .k1 import (
    K1Element,
    TateClass,
    augment_sign,
    det,
    k1_minus_one,
    k1_of_unit,
    k1_one,
    k1_sign,
    k1_star,
    tate_reduce,
)
from .matrix import Matrix
from .rings import (
    GF,
    QQ,
    ZZ,
    RingSpec,
    Scalar,
    combine_rings,
    extend_with_variable,
    laurent_ring,
    scalar,
)
from .smith import smith_split, solve, supports_smith

__all__ = [
    "GF",
    "K1Element",
    "Matrix",
    "QQ",
    "RingSpec",
    "Scalar",
    "TateClass",
    "ZZ",
    "augment_sign",
    "combine_rings",
    "det",
    "extend_with_variable",
    "k1_minus_one",
    "k1_of_unit",
    "k1_one",
    "k1_sign",
    "k1_star",
    "laurent_ring",
    "scalar",
    "smith_split",
    "solve",
    "supports_smith",
    "tate_reduce",
]
