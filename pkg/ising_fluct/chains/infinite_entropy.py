"""
Entanglement entropy of a semi-infinite half of the infinite transverse-field
Ising chain, its dispersion and fluctuations.

Series (ground truth, from the free-fermion ladder):

    S = sum_j eps_j / (1 + e^{eps_j}) + sum_j ln(1 + e^{-eps_j})
    D = sum_j (eps_j / 2)^2 / cosh^2(eps_j / 2)

Closed forms in complete elliptic integrals, k = min(lambda, 1/lambda):

    lambda < 1:  S = [ln(16 / k^2 k'^2) + (4/pi)(k^2 - k'^2) K K'] / 24
                 D = 2/(3 pi^2) K'^2 K [k'^2 K + (k^2 - k'^2) E]
    lambda > 1:  S = [ln(k^2 / 16 k') + (4/pi)(1 - k^2/2) K K'] / 12 + ln 2
                 D = 4/(3 pi^2) K'^2 K [(1 - k^2/2) E - (1 - k^2) K]

The closed forms lose their digits to cancellation as k -> 0, so for
k < CLOSED_FORM_MIN_K they hand over to the series.

Near lambda = 1 both S and D grow like ln(1/|1 - lambda|) / 12.
"""

import math
from logging import getLogger

import numpy as np
from scipy.special import expit

from ising_fluct.chains.free_fermion import (
    DEFAULT_MAX_TERMS,
    DEFAULT_TOL,
    FermionSpectrum,
    Phase,
    as_coupling,
    fermion_spectrum,
    ladder_sum,
)
from ising_fluct.exceptions import DomainError, NegativeRadicandError
from ising_fluct.special.elliptic import EllipticPair
from ising_fluct.special.solvers import (
    ExtremumResult,
    RootResult,
    find_maximum,
    find_root,
    scan_bracket,
)
from ising_fluct.statistics import EntropyStats

logger = getLogger("InfiniteEntropy")

RADICAND_RTOL = 1e-12
# below this modulus the closed forms cancel to a few digits; the ladder
# converges within a handful of terms there
CLOSED_FORM_MIN_K = 0.25
SCAN_POINTS = 1000
ROOT_XTOL = 1e-12
EXTREMUM_XTOL = 1e-6

# |1 - lambda| ranges of the landmark scans
LAMBDA_F_SCAN = (1e-2, 5e-7)
LAMBDA_M_SCAN = (1e-6, 1.0)


def entropy_summand(x):
    return x * expit(-x) + np.log1p(np.exp(-x))


def dispersion_summand(x):
    # (x/2)^2 / cosh^2(x/2) without overflowing cosh
    return x * x * expit(x) * expit(-x)


def spectrum_entropy(
    s: FermionSpectrum, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS
) -> float:
    value, _ = ladder_sum(s, entropy_summand, tol=tol, max_terms=max_terms, power=1)
    return value


def spectrum_dispersion(
    s: FermionSpectrum, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS
) -> float:
    value, _ = ladder_sum(s, dispersion_summand, tol=tol, max_terms=max_terms, power=2)
    return value


def entropy_series(c, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS) -> float:
    return spectrum_entropy(fermion_spectrum(c), tol=tol, max_terms=max_terms)


def dispersion_series(
    c, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS
) -> float:
    return spectrum_dispersion(fermion_spectrum(c), tol=tol, max_terms=max_terms)


def _log_k_prime(pair: EllipticPair) -> float:
    return 0.5 * math.log1p(-pair.k * pair.k)


def _entropy_closed(pair: EllipticPair, phase: Phase) -> float:
    k, kp = pair.k, pair.k_prime
    KK = pair.K * pair.K_prime
    if phase is Phase.DISORDERED:
        log_term = math.log(16.0) - 2.0 * math.log(k) - 2.0 * _log_k_prime(pair)
        return (log_term + 4.0 / math.pi * (k - kp) * (k + kp) * KK) / 24.0
    log_term = 2.0 * math.log(k) - math.log(16.0) - _log_k_prime(pair)
    return (log_term + 4.0 / math.pi * (1.0 - 0.5 * k * k) * KK) / 12.0 + math.log(2.0)


def _dispersion_closed(pair: EllipticPair, phase: Phase) -> float:
    k, kp, K, E = pair.k, pair.k_prime, pair.K, pair.E
    if phase is Phase.DISORDERED:
        positive, negative = kp * kp * K, (k * k - kp * kp) * E
        prefactor = 2.0 / (3.0 * math.pi**2)
    else:
        positive, negative = (1.0 - 0.5 * k * k) * E, -(kp * kp) * K
        prefactor = 4.0 / (3.0 * math.pi**2)
    radicand = positive + negative
    if radicand < -RADICAND_RTOL * (abs(positive) + abs(negative)):
        msg = f"negative radicand {radicand!r} in closed-form fluctuation at k={k}"
        logger.error(msg)
        raise NegativeRadicandError(msg)
    # rounding-level negatives only (radicand is O(k^4) as k -> 0 when ordered)
    radicand = max(radicand, 0.0)
    return prefactor * pair.K_prime**2 * K * radicand


def entropy_elliptic(c) -> float:
    """The elliptic closed form for S at every k, cancellation included."""
    c = as_coupling(c)
    return _entropy_closed(c.elliptic(), c.phase)


def dispersion_elliptic(c) -> float:
    c = as_coupling(c)
    return _dispersion_closed(c.elliptic(), c.phase)


def entropy_closed(c) -> float:
    """S from the elliptic closed form; the ladder series below CLOSED_FORM_MIN_K."""
    c = as_coupling(c)
    if c.k < CLOSED_FORM_MIN_K:
        return entropy_series(c)
    return entropy_elliptic(c)


def dispersion_closed(c) -> float:
    c = as_coupling(c)
    if c.k < CLOSED_FORM_MIN_K:
        return dispersion_series(c)
    return dispersion_elliptic(c)


def fluctuation_closed(c) -> float:
    return math.sqrt(dispersion_closed(c))


def stats(c) -> EntropyStats:
    c = as_coupling(c)
    return EntropyStats.from_moments(entropy_closed(c), dispersion_closed(c))


def delta_S(c):
    """Relative fluctuation dS/S; None where S vanishes."""
    return stats(c).delta


def _critical_distance(lam: float) -> float:
    lam = float(lam)
    distance = abs(1.0 - lam)
    if not math.isfinite(lam) or not 0.0 < distance < 1.0:
        msg = f"asymptotes need 0 < |1 - lambda| < 1, got lambda={lam}"
        logger.error(msg)
        raise DomainError(msg)
    return distance


def asymptote_S(lam: float) -> float:
    """(c/6) ln(1/|1 - lambda|) with c = 1/2."""
    return math.log(1.0 / _critical_distance(lam)) / 12.0


def asymptote_D(lam: float) -> float:
    return math.log(1.0 / _critical_distance(lam)) / 12.0


def asymptote_second_moment(lam: float) -> float:
    return asymptote_S(lam) ** 2 + asymptote_D(lam)


def _fluctuation_minus_entropy(lam: float) -> float:
    s = stats(lam)
    return s.dS - s.S


def find_lambda_f_infinite(
    xtol: float = ROOT_XTOL, scan_points: int = SCAN_POINTS
) -> RootResult:
    """
    Crossing dS = S just below the critical point (dS > S on (0, lambda_f)).
    """
    distances = np.geomspace(*LAMBDA_F_SCAN, scan_points)
    grid = 1.0 - distances  # ascending in lambda
    lo, hi = scan_bracket(_fluctuation_minus_entropy, grid)
    result = find_root(_fluctuation_minus_entropy, lo, hi, xtol=xtol)
    logger.info(f"infinite-chain lambda_f = {result.root:.9f}")
    return result


def _relative_fluctuation(lam: float) -> float:
    delta = delta_S(lam)
    return -np.inf if delta is None else delta


def find_lambda_m(
    xtol: float = EXTREMUM_XTOL, scan_points: int = SCAN_POINTS
) -> ExtremumResult:
    """Maximum of dS/S in the ordered phase, lambda in (1, 2)."""
    grid = 1.0 + np.geomspace(*LAMBDA_M_SCAN, scan_points)
    result = find_maximum(_relative_fluctuation, grid, xtol=xtol)
    if result.at_boundary:
        logger.warning(f"dS/S maximum hit the scan edge at lambda={result.x}")
    logger.info(f"lambda_m = {result.x:.7f}, delta_m = {result.value:.7f}")
    return result
