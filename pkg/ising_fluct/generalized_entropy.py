"""
Renyi and Tsallis entropies, moments of S^ = -ln(rho) from alpha-derivatives
of Tr rho^alpha, and the conformal scaling forms near the critical point.

A "source" is one of
  - SchmidtSpectrum   (finite chain or dimer: explicit eigenvalues)
  - FermionSpectrum   (infinite chain: Tr rho^alpha from the ladder)
  - Coupling          (infinite chain, resolved to its FermionSpectrum;
                       moments then come from the closed forms)
"""

import math
from logging import getLogger
from typing import Union

import numpy as np
from scipy.special import logsumexp

from ising_fluct.chains import infinite_entropy
from ising_fluct.chains.free_fermion import (
    Coupling,
    FermionSpectrum,
    fermion_spectrum,
    ladder_sum,
)
from ising_fluct.exceptions import DomainError
from ising_fluct.statistics import (
    EntropyStats,
    SchmidtSpectrum,
    entropy_stats_from_spectrum,
)

logger = getLogger("GeneralizedEntropy")

Source = Union[SchmidtSpectrum, FermionSpectrum, Coupling]

DEFAULT_TOL = 1e-15
DEFAULT_MAX_TERMS = 10_000_000
DERIVATIVE_STEP = 1e-4
EXPANSION_VALIDITY = 0.1
ISING_CENTRAL_CHARGE = 0.5


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0.0:
        msg = f"order alpha={alpha} must be finite and > 0"
        logger.error(msg)
        raise DomainError(msg)
    return alpha


def _check_not_one(alpha: float):
    if alpha == 1.0:
        msg = "alpha = 1 is the von Neumann limit: use von_neumann(source)"
        logger.error(msg)
        raise DomainError(msg)


def _as_spectrum(source: Source):
    if isinstance(source, Coupling):
        return fermion_spectrum(source)
    if isinstance(source, (SchmidtSpectrum, FermionSpectrum)):
        return source
    msg = f"unsupported entropy source {type(source).__name__}"
    logger.error(msg)
    raise DomainError(msg)


def log_trace_rho_alpha(
    source: Source,
    alpha: float,
    tol: float = DEFAULT_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> float:
    """ln Tr rho^alpha."""
    alpha = check_alpha(alpha)
    if alpha == 1.0:
        return 0.0
    spectrum = _as_spectrum(source)

    if isinstance(spectrum, SchmidtSpectrum):
        probs = spectrum.probs[spectrum.probs > 0.0]
        return float(logsumexp(alpha * np.log(probs)))

    # Tr rho^alpha = prod_j (1 + e^{-alpha eps_j}) / (1 + e^{-eps_j})^alpha
    def summand(x):
        return np.log1p(np.exp(-alpha * x)) - alpha * np.log1p(np.exp(-x))

    value, _ = ladder_sum(
        spectrum, summand, tol=tol, max_terms=max_terms, rate=min(alpha, 1.0)
    )
    return value


def renyi(source: Source, alpha: float, tol: float = DEFAULT_TOL) -> float:
    alpha = check_alpha(alpha)
    _check_not_one(alpha)
    return log_trace_rho_alpha(source, alpha, tol=tol) / (1.0 - alpha)


def tsallis(source: Source, alpha: float, tol: float = DEFAULT_TOL) -> float:
    alpha = check_alpha(alpha)
    _check_not_one(alpha)
    return -math.expm1(log_trace_rho_alpha(source, alpha, tol=tol)) / (alpha - 1.0)


def renyi_from_tsallis(t: float, alpha: float) -> float:
    alpha = check_alpha(alpha)
    _check_not_one(alpha)
    argument = (1.0 - alpha) * t
    if argument <= -1.0:
        msg = f"1 + (1 - alpha) t = {1.0 + argument!r} <= 0 (t={t}, alpha={alpha})"
        logger.error(msg)
        raise DomainError(msg)
    return math.log1p(argument) / (1.0 - alpha)


def tsallis_from_renyi(r: float, alpha: float) -> float:
    alpha = check_alpha(alpha)
    _check_not_one(alpha)
    return math.expm1((1.0 - alpha) * r) / (1.0 - alpha)


def source_stats(source: Source, tol: float = DEFAULT_TOL) -> EntropyStats:
    if isinstance(source, Coupling):
        return infinite_entropy.stats(source)
    if isinstance(source, FermionSpectrum):
        return EntropyStats.from_moments(
            infinite_entropy.spectrum_entropy(source, tol=tol),
            infinite_entropy.spectrum_dispersion(source, tol=tol),
        )
    if isinstance(source, SchmidtSpectrum):
        return entropy_stats_from_spectrum(source)
    msg = f"unsupported entropy source {type(source).__name__}"
    logger.error(msg)
    raise DomainError(msg)


def von_neumann(source: Source, tol: float = DEFAULT_TOL) -> float:
    return source_stats(source, tol=tol).S


def tsallis_moment_expansion(source: Source, alpha: float, order: int = 2) -> float:
    """S - (alpha - 1) <S^2> / 2; error O((alpha - 1)^2)."""
    alpha = check_alpha(alpha)
    if order != 2:
        msg = f"only the second-order expansion is provided, got order={order}"
        logger.error(msg)
        raise DomainError(msg)
    if abs(alpha - 1.0) > EXPANSION_VALIDITY:
        logger.warning(
            f"alpha={alpha}: moment expansion used outside |alpha - 1| <= {EXPANSION_VALIDITY}"
        )
    s = source_stats(source)
    return s.S - 0.5 * (alpha - 1.0) * s.second_moment


def moment_by_alpha_derivative(
    source: Source, n: int, step: float = DERIVATIVE_STEP, tol: float = DEFAULT_TOL
) -> float:
    """
    <S^n> = (-1)^n d^n/d alpha^n Tr rho^alpha at alpha = 1, by 5-point
    central differences.
    """
    if n not in (1, 2):
        msg = f"moment order n={n} must be 1 or 2"
        logger.error(msg)
        raise DomainError(msg)
    if not 0.0 < step < 0.5:
        msg = f"derivative step {step} must be in (0, 0.5)"
        logger.error(msg)
        raise DomainError(msg)

    def trace(alpha):
        return math.exp(log_trace_rho_alpha(source, alpha, tol=tol))

    t_m2, t_m1 = trace(1.0 - 2.0 * step), trace(1.0 - step)
    t_p1, t_p2 = trace(1.0 + step), trace(1.0 + 2.0 * step)
    if n == 1:
        first = (-t_p2 + 8.0 * t_p1 - 8.0 * t_m1 + t_m2) / (12.0 * step)
        return -first
    second = (-t_p2 + 16.0 * t_p1 - 30.0 * 1.0 + 16.0 * t_m1 - t_m2) / (12.0 * step**2)
    return second


def correlation_length(lam: float) -> float:
    """xi = 1 / |1 - lambda| for the Ising chain."""
    lam = float(lam)
    if not math.isfinite(lam) or lam == 1.0:
        msg = f"correlation length needs finite lambda != 1, got {lam}"
        logger.error(msg)
        raise DomainError(msg)
    return 1.0 / abs(1.0 - lam)


def _check_cft(xi: float, c: float, boundaries: int):
    if not xi > 1.0 or not math.isfinite(xi):
        msg = f"correlation length xi={xi} must be finite and > 1"
        logger.error(msg)
        raise DomainError(msg)
    if not c > 0.0:
        msg = f"central charge c={c} must be > 0"
        logger.error(msg)
        raise DomainError(msg)
    if int(boundaries) != boundaries or boundaries < 1:
        msg = f"boundary count A={boundaries} must be an integer >= 1"
        logger.error(msg)
        raise DomainError(msg)


def cft_trace_asymptote(
    xi: float, c: float, alpha: float, boundaries: int = 1
) -> float:
    """Tr rho^alpha ~ xi^(-A c (alpha - 1/alpha) / 12), with c_alpha = 1."""
    _check_cft(xi, c, boundaries)
    alpha = check_alpha(alpha)
    exponent = -boundaries * c * (alpha - 1.0 / alpha) / 12.0
    return math.exp(exponent * math.log(xi))


def cft_S(xi: float, c: float, boundaries: int = 1) -> float:
    """S ~ A (c/6) ln(xi)."""
    _check_cft(xi, c, boundaries)
    return boundaries * c / 6.0 * math.log(xi)


def cft_second_moment(xi: float, c: float, boundaries: int = 1) -> float:
    """<S^2> ~ s^2 + s with s = A (c/6) ln(xi)."""
    s = cft_S(xi, c, boundaries)
    return s * s + s


def cft_fluctuation(xi: float, c: float, boundaries: int = 1) -> float:
    """dS ~ sqrt(A (c/6) ln(xi)), so dS grows like sqrt(A)."""
    return math.sqrt(cft_S(xi, c, boundaries))
