from ising_fluct.special.elliptic import (
    EllipticPair,
    Modulus,
    complement,
    dK_dk,
    dq_dk,
    elliptic_pair,
    ellint_E,
    ellint_K,
    nome,
)
from ising_fluct.special.solvers import (
    ExtremumResult,
    RootResult,
    find_maximum,
    find_root,
    scan_bracket,
)
