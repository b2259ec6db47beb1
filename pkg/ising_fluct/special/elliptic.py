"""
Complete elliptic integrals K(k), E(k), the complementary modulus and the
Jacobi nome, all evaluated with the arithmetic-geometric mean.

    K(k) = int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t)
    E(k) = int_0^{pi/2} sqrt(1 - k^2 sin^2 t) dt

The modulus convention is used throughout (not the parameter m = k^2).
"""

import math
from dataclasses import dataclass
from logging import getLogger

from ising_fluct.exceptions import DomainError, NonConvergenceError, NumericalRangeError

logger = getLogger("Elliptic")

AGM_RTOL = 1e-16
AGM_MAX_ITER = 64
K_MAX_MODULUS = 1.0 - 1e-15


def _check_finite(x, name="k"):
    if not math.isfinite(x):
        msg = f"{name}={x} must be finite"
        logger.error(msg)
        raise DomainError(msg)


def complement(k: float) -> float:
    """k' = sqrt(1 - k^2), written as sqrt((1-k)(1+k)) to keep digits near k = 1."""
    _check_finite(k)
    if not 0.0 <= k <= 1.0:
        msg = f"modulus k={k} outside [0, 1]"
        logger.error(msg)
        raise DomainError(msg)
    return math.sqrt((1.0 - k) * (1.0 + k))


def _agm_KE(k: float, kp: float):
    """
    (K, E) at modulus k, given its complement kp explicitly.

    Passing the complement separately lets callers evaluate K(k'), E(k') as
    _agm_KE(kp, k) without ever forming sqrt(1 - kp^2) in floating point.
    """
    a, b, c = 1.0, kp, k
    power = 0.5
    c_sum = power * c * c
    for _ in range(AGM_MAX_ITER):
        if abs(a - b) <= AGM_RTOL * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        power *= 2.0
        c_sum += power * c * c
    else:
        if abs(a - b) > 4.0 * 2.2e-16 * a:
            msg = f"AGM did not converge for k={k}, k'={kp}: a={a}, b={b}"
            logger.error(msg)
            raise NonConvergenceError(msg)
    K = math.pi / (2.0 * a)
    return K, K * (1.0 - c_sum)


def ellint_K(k: float) -> float:
    """Complete elliptic integral of the first kind."""
    _check_finite(k)
    if k < 0.0 or k >= 1.0:
        msg = f"K(k) needs 0 <= k < 1, got k={k}"
        logger.error(msg)
        raise DomainError(msg)
    if k > K_MAX_MODULUS:
        msg = f"k={k} too close to 1 for K (limit {K_MAX_MODULUS!r})"
        logger.error(msg)
        raise NumericalRangeError(msg)
    K, _ = _agm_KE(k, complement(k))
    return K


def ellint_E(k: float) -> float:
    """Complete elliptic integral of the second kind."""
    _check_finite(k)
    if k < 0.0 or k > 1.0:
        msg = f"E(k) needs 0 <= k <= 1, got k={k}"
        logger.error(msg)
        raise DomainError(msg)
    if k == 1.0:
        return 1.0
    if k > K_MAX_MODULUS:
        # E is finite at k = 1; the AGM just needs too many halvings to get there
        kp = complement(k)
        return 1.0 + 0.5 * kp * kp * (math.log(4.0 / kp) - 0.5)
    _, E = _agm_KE(k, complement(k))
    return E


@dataclass(frozen=True)
class Modulus:
    k: float
    k_prime: float

    @classmethod
    def from_k(cls, k: float):
        _check_finite(k)
        if not 0.0 <= k < 1.0:
            msg = f"modulus needs 0 <= k < 1, got k={k}"
            logger.error(msg)
            raise DomainError(msg)
        return cls(k=k, k_prime=complement(k))


@dataclass(frozen=True)
class EllipticPair:
    """K, E at k and at the complementary modulus k', from one modulus."""

    k: float
    k_prime: float
    K: float
    K_prime: float
    E: float
    E_prime: float

    @classmethod
    def from_modulus(cls, modulus: Modulus):
        k, kp = modulus.k, modulus.k_prime
        if k <= 0.0:
            msg = "K(k') diverges at k = 0"
            logger.error(msg)
            raise DomainError(msg)
        K, E = _agm_KE(k, kp)
        K_prime, E_prime = _agm_KE(kp, k)
        return cls(k=k, k_prime=kp, K=K, K_prime=K_prime, E=E, E_prime=E_prime)

    @property
    def log_nome(self) -> float:
        """ln q = -pi K'/K; stays finite when q itself underflows."""
        return -math.pi * self.K_prime / self.K

    def legendre_defect(self) -> float:
        return abs(
            self.E * self.K_prime
            + self.E_prime * self.K
            - self.K * self.K_prime
            - 0.5 * math.pi
        )


def elliptic_pair(k: float) -> EllipticPair:
    """All four integrals for 0 < k < 1."""
    _check_finite(k)
    if not 0.0 < k < 1.0:
        msg = f"elliptic pair needs 0 < k < 1, got k={k}"
        logger.error(msg)
        raise DomainError(msg)
    return EllipticPair.from_modulus(Modulus.from_k(k))


def _check_open_unit(k: float, what: str):
    _check_finite(k)
    if not 0.0 < k < 1.0:
        msg = f"{what} needs 0 < k < 1, got k={k}"
        logger.error(msg)
        raise DomainError(msg)


def nome(k: float) -> float:
    """Jacobi nome q = exp(-pi K(k') / K(k))."""
    _check_open_unit(k, "nome")
    return math.exp(elliptic_pair(k).log_nome)


def dK_dk(k: float) -> float:
    """dK/dk = (E/k'^2 - K) / k."""
    _check_open_unit(k, "dK/dk")
    pair = elliptic_pair(k)
    return (pair.E / pair.k_prime**2 - pair.K) / k


def dq_dk(k: float) -> float:
    """dq/dk = pi^2 q / (2 k k'^2 K^2)."""
    _check_open_unit(k, "dq/dk")
    pair = elliptic_pair(k)
    q = math.exp(pair.log_nome)
    return math.pi**2 * q / (2.0 * k * pair.k_prime**2 * pair.K**2)
