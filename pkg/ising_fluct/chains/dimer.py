"""
Two-qubit Ising dimer, H2 = -s1x - s2x - lambda s1z s2z, in closed form.

Basis ordering: |1,1>, |1,-1>, |-1,1>, |-1,-1> (z eigenvalues of sites 1, 2).
Both signs of lambda are allowed; the ground energy -sqrt(lambda^2 + 4) is
the same for either.
"""

import math
from dataclasses import dataclass
from logging import getLogger

import numpy as np

from ising_fluct.exceptions import DomainError, NormalizationError
from ising_fluct.special.solvers import RootResult, find_root
from ising_fluct.statistics import EntropyStats, SchmidtSpectrum

logger = getLogger("Dimer")

LAMBDA_F_BRACKET = (1.0, 5.0)
ROOT_XTOL = 1e-12


def check_coupling(lam: float) -> float:
    lam = float(lam)
    if not math.isfinite(lam):
        msg = f"dimer coupling lambda={lam} must be finite"
        logger.error(msg)
        raise DomainError(msg)
    return lam


def dimer_hamiltonian(lam: float) -> np.ndarray:
    lam = check_coupling(lam)
    return -np.array(
        [
            [lam, 1.0, 1.0, 0.0],
            [1.0, -lam, 0.0, 1.0],
            [1.0, 0.0, -lam, 1.0],
            [0.0, 1.0, 1.0, lam],
        ]
    )


def dimer_spectrum(lam: float) -> np.ndarray:
    lam = check_coupling(lam)
    root = math.hypot(lam, 2.0)
    return np.sort(np.array([-root, -lam, lam, root]))


@dataclass(frozen=True)
class DimerGround:
    energy: float
    amplitudes: np.ndarray
    norm_const: float

    def residual(self, lam: float) -> float:
        H = dimer_hamiltonian(lam)
        return float(np.linalg.norm(H @ self.amplitudes - self.energy * self.amplitudes))


def dimer_ground(lam: float) -> DimerGround:
    lam = check_coupling(lam)
    root = math.hypot(lam, 2.0)
    # lambda + sqrt(lambda^2 + 4) cancels for lambda << 0
    a = lam + root if lam >= 0.0 else 4.0 / (root - lam)
    d = 2.0 * (a * a + 4.0)
    amplitudes = np.array([a, 2.0, 2.0, a]) / math.sqrt(d)
    return DimerGround(energy=-root, amplitudes=amplitudes, norm_const=d)


def concurrence_of_state(a) -> float:
    """C = 2 |a(1,1) a(-1,-1) - a(1,-1) a(-1,1)| for a normalised 2-qubit state."""
    a = np.asarray(a, dtype=float)
    if a.shape != (4,):
        msg = f"expected 4 amplitudes, got shape {a.shape}"
        logger.error(msg)
        raise DomainError(msg)
    norm = float(np.sum(a * a))
    if abs(norm - 1.0) > 1e-10:
        msg = f"state not normalised: sum a^2 = {norm!r}"
        logger.error(msg)
        raise NormalizationError(msg)
    C = 2.0 * abs(a[0] * a[3] - a[1] * a[2])
    return min(max(C, 0.0), 1.0)


def dimer_concurrence(lam: float) -> float:
    """C = [1 + (2/lambda)^2]^(-1/2) = |lambda| / sqrt(lambda^2 + 4)."""
    lam = check_coupling(lam)
    return abs(lam) / math.hypot(lam, 2.0)


def _check_concurrence(C: float) -> float:
    C = float(C)
    if not 0.0 <= C <= 1.0:
        msg = f"concurrence C={C} outside [0, 1]"
        logger.error(msg)
        raise DomainError(msg)
    return C


def schmidt_weights(C: float):
    """(p+, p-) = (1 +- sqrt(1 - C^2)) / 2."""
    C = _check_concurrence(C)
    root = math.sqrt((1.0 - C) * (1.0 + C))
    p_plus = 0.5 * (1.0 + root)
    # p- = C^2 / (4 p+) avoids the cancellation in 1 - root for small C
    return p_plus, 0.25 * C * C / p_plus


def entropy_from_C(C: float) -> float:
    p_plus, p_minus = schmidt_weights(C)
    return -sum(p * math.log(p) for p in (p_plus, p_minus) if p > 0.0) + 0.0


def fluctuation_from_C(C: float) -> float:
    """dS = C ln[(1 + sqrt(1 - C^2)) / C], extended by 0 at C = 0."""
    C = _check_concurrence(C)
    if C == 0.0:
        return 0.0
    return C * math.log((1.0 + math.sqrt((1.0 - C) * (1.0 + C))) / C)


def dimer_schmidt_spectrum(lam: float) -> SchmidtSpectrum:
    p_plus, p_minus = schmidt_weights(dimer_concurrence(lam))
    return SchmidtSpectrum.from_probabilities([p_plus, p_minus])


def dimer_stats(lam: float) -> EntropyStats:
    C = dimer_concurrence(lam)
    S = entropy_from_C(C)
    dS = fluctuation_from_C(C)
    return EntropyStats.from_moments(S, dS * dS)


def _fluctuation_minus_entropy(lam: float) -> float:
    C = dimer_concurrence(lam)
    return fluctuation_from_C(C) - entropy_from_C(C)


def dimer_lambda_f(xtol: float = ROOT_XTOL) -> RootResult:
    """Crossing of dS and S for the dimer (dS > S below it)."""
    result = find_root(_fluctuation_minus_entropy, *LAMBDA_F_BRACKET, xtol=xtol)
    logger.info(f"dimer lambda_f = {result.root:.9f}")
    return result
