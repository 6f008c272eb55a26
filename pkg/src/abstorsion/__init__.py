"""abstorsion: exact absolute Whitehead torsion for based chain complexes,
chain equivalences, and symmetric Poincare complexes over a concrete ring
tower (Z, Q, F_p, and multivariate Laurent extensions)."""

__version__ = "0.1.0"

from .exactring import (  # noqa: F401
    GF,
    K1Element,
    Matrix,
    QQ,
    RingSpec,
    Scalar,
    TateClass,
    ZZ,
    augment_sign,
    det,
    k1_star,
    laurent_ring,
    smith_split,
    tate_reduce,
)
