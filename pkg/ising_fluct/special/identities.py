"""
Numerical checks of the product and sum identities that turn the
free-fermion ladder sums into closed forms in complete elliptic integrals.
With q the nome of k:

    A1   prod (1 + q^(2j+1))                = (16 q / k^2 k'^2)^(1/24)
    A2   prod (1 + q^(2j))                  = 2 (k^2 / 16 q k')^(1/12)
    A3   sum (2j+1) q^(2j+1) / (1 + q^(2j+1))       = [1 - (1 - 2k^2)(2K/pi)^2] / 24
    A4   sum 2j q^(2j) / (1 + q^(2j))               = [(1 - k^2/2)(2K/pi)^2 - 1] / 12
    A5   sum (2j+1)^2 q^(2j+1) / (1 + q^(2j+1))^2   = 2K^3/(3pi^4) [(1 - k^2) K - (1 - 2k^2) E]
    A6   sum (2j)^2 q^(2j) / (1 + q^(2j))^2         = 4K^3/(3pi^4) [(1 - k^2/2) E - (1 - k^2) K]

plus dq/dk, dK/dk and the Legendre relation. Products are summed in log
space on the ladder eps_j of spacing eps = -ln q.
"""

import math
from dataclasses import dataclass
from logging import getLogger
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.special import expit

from ising_fluct.chains import infinite_entropy
from ising_fluct.chains.free_fermion import (
    Branch,
    Coupling,
    FermionSpectrum,
    fermion_spectrum,
    ladder_sum,
)
from ising_fluct.exceptions import DomainError, NumericalRangeError
from ising_fluct.special.elliptic import (
    EllipticPair,
    dK_dk,
    dq_dk,
    elliptic_pair,
    ellint_K,
    nome,
)

logger = getLogger("Identities")

K_MAX = 0.9999
DEFAULT_TOL = 1e-12
SERIES_TOL = 1e-16
MAX_TERMS = 1_000_000
FD_STEP = 1e-6
DERIVATIVE_TOL = 1e-6

IDENTITY_FAMILIES = ("A1", "A2", "A3", "A4", "A5", "A6", "dqdk", "dIdk", "legendre")
STANDARD_K_GRID = tuple(round(0.05 * ii, 2) for ii in range(1, 20))


@dataclass(frozen=True)
class IdentityReport:
    name: str
    k: float
    lhs: float
    rhs: float
    defect: float
    terms_used: int
    tolerance: float
    passed: bool
    lam: Optional[float] = None

    @classmethod
    def compare(cls, name, k, lhs, rhs, terms_used, tolerance, lam=None):
        defect = abs(lhs - rhs)
        return cls(
            name=name,
            k=float(k),
            lhs=float(lhs),
            rhs=float(rhs),
            defect=float(defect),
            terms_used=max(int(terms_used), 1),
            tolerance=float(tolerance),
            passed=bool(defect < tolerance),
            lam=None if lam is None else float(lam),
        )

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lambda": self.lam,
            "k": self.k,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "defect": self.defect,
            "terms_used": self.terms_used,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _pair(k: float) -> EllipticPair:
    k = float(k)
    if not math.isfinite(k) or not 0.0 < k < 1.0:
        msg = f"identities need 0 < k < 1, got k={k}"
        logger.error(msg)
        raise DomainError(msg)
    if k > K_MAX:
        msg = f"k={k} above {K_MAX}: the nome is too close to 1 for the truncated sums"
        logger.error(msg)
        raise NumericalRangeError(msg)
    return elliptic_pair(k)


def _ladder(pair: EllipticPair, branch: Branch) -> FermionSpectrum:
    return FermionSpectrum(epsilon=-pair.log_nome, branch=branch)


def _log_factor(x):
    return np.log1p(np.exp(-x))


def _first_moment(x):
    return x * expit(-x)


def _second_moment(x):
    return x * x * expit(x) * expit(-x)


def _sum(s: FermionSpectrum, summand, power: int = 0, max_terms: int = MAX_TERMS):
    return ladder_sum(s, summand, tol=SERIES_TOL, max_terms=max_terms, power=power)


def _log_k_prime(k: float) -> float:
    return 0.5 * math.log1p(-k * k)


def check_A1(
    k: float, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS
) -> IdentityReport:
    pair = _pair(k)
    log_lhs, n = _sum(_ladder(pair, Branch.ODD), _log_factor, max_terms=max_terms)
    log_rhs = (
        math.log(16.0) + pair.log_nome - 2.0 * math.log(k) - 2.0 * _log_k_prime(k)
    ) / 24.0
    return IdentityReport.compare("A1", k, math.exp(log_lhs), math.exp(log_rhs), n, tol)


def check_A2(
    k: float, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS
) -> IdentityReport:
    pair = _pair(k)
    log_lhs, n = _sum(_ladder(pair, Branch.EVEN), _log_factor, max_terms=max_terms)
    log_rhs = math.log(2.0) + (
        2.0 * math.log(k) - math.log(16.0) - pair.log_nome - _log_k_prime(k)
    ) / 12.0
    return IdentityReport.compare("A2", k, math.exp(log_lhs), math.exp(log_rhs), n, tol)


def check_A3(
    k: float, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS
) -> IdentityReport:
    pair = _pair(k)
    s = _ladder(pair, Branch.ODD)
    energy, n = _sum(s, _first_moment, power=1, max_terms=max_terms)
    theta_sq = (2.0 * pair.K / math.pi) ** 2
    rhs = (1.0 - (1.0 - 2.0 * k * k) * theta_sq) / 24.0
    return IdentityReport.compare("A3", k, energy / s.epsilon, rhs, n, tol)


def check_A4(
    k: float, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS
) -> IdentityReport:
    pair = _pair(k)
    s = _ladder(pair, Branch.EVEN)
    energy, n = _sum(s, _first_moment, power=1, max_terms=max_terms)
    theta_sq = (2.0 * pair.K / math.pi) ** 2
    rhs = ((1.0 - 0.5 * k * k) * theta_sq - 1.0) / 12.0
    return IdentityReport.compare("A4", k, energy / s.epsilon, rhs, n, tol)


def check_A5(
    k: float, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS
) -> IdentityReport:
    pair = _pair(k)
    s = _ladder(pair, Branch.ODD)
    dispersion, n = _sum(s, _second_moment, power=2, max_terms=max_terms)
    K, E = pair.K, pair.E
    rhs = 2.0 * K**3 / (3.0 * math.pi**4) * (pair.k_prime**2 * K - (1.0 - 2.0 * k * k) * E)
    return IdentityReport.compare("A5", k, dispersion / s.epsilon**2, rhs, n, tol)


def check_A6(
    k: float, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS
) -> IdentityReport:
    pair = _pair(k)
    s = _ladder(pair, Branch.EVEN)
    dispersion, n = _sum(s, _second_moment, power=2, max_terms=max_terms)
    K, E = pair.K, pair.E
    rhs = 4.0 * K**3 / (3.0 * math.pi**4) * ((1.0 - 0.5 * k * k) * E - pair.k_prime**2 * K)
    return IdentityReport.compare("A6", k, dispersion / s.epsilon**2, rhs, n, tol)


def _central_difference(f, k: float) -> float:
    return (f(k + FD_STEP) - f(k - FD_STEP)) / (2.0 * FD_STEP)


def check_dq_dk(k: float, tol: float = DERIVATIVE_TOL) -> IdentityReport:
    _pair(k)
    if not FD_STEP < k < 1.0 - FD_STEP:
        msg = f"k={k} too close to the edge for a finite difference"
        logger.error(msg)
        raise DomainError(msg)
    return IdentityReport.compare("dqdk", k, dq_dk(k), _central_difference(nome, k), 2, tol)


def check_dK_dk(k: float, tol: float = DERIVATIVE_TOL) -> IdentityReport:
    _pair(k)
    if not FD_STEP < k < 1.0 - FD_STEP:
        msg = f"k={k} too close to the edge for a finite difference"
        logger.error(msg)
        raise DomainError(msg)
    return IdentityReport.compare(
        "dIdk", k, dK_dk(k), _central_difference(ellint_K, k), 2, tol
    )


def check_legendre(k: float, tol: float = DEFAULT_TOL) -> IdentityReport:
    pair = _pair(k)
    lhs = pair.E * pair.K_prime + pair.E_prime * pair.K - pair.K * pair.K_prime
    return IdentityReport.compare("legendre", k, lhs, 0.5 * math.pi, 1, tol)


def check_useful_relations(k: float, tol: float = DEFAULT_TOL):
    """(dq/dk, dK/dk, Legendre). Derivatives are always held to DERIVATIVE_TOL."""
    return check_dq_dk(k), check_dK_dk(k), check_legendre(k, tol)


_CHECKS = {
    "A1": check_A1,
    "A2": check_A2,
    "A3": check_A3,
    "A4": check_A4,
    "A5": check_A5,
    "A6": check_A6,
    "dqdk": lambda k, tol: check_dq_dk(k),
    "dIdk": lambda k, tol: check_dK_dk(k),
    "legendre": check_legendre,
}


def run_identity_suite(
    k_grid: Sequence[float] = STANDARD_K_GRID,
    tol: float = DEFAULT_TOL,
    only: Iterable[str] = None,
) -> List[IdentityReport]:
    """Every requested family on every k, family-major order."""
    if not tol > 0.0:
        msg = f"tolerance must be > 0, got {tol}"
        logger.error(msg)
        raise DomainError(msg)
    families = IDENTITY_FAMILIES if only is None else tuple(only)
    unknown = [name for name in families if name not in _CHECKS]
    if len(unknown) > 0:
        msg = f"unknown identity families {unknown}; choose from {IDENTITY_FAMILIES}"
        logger.error(msg)
        raise DomainError(msg)

    reports = [_CHECKS[name](k, tol) for name in families for k in k_grid]
    failed = [r for r in reports if not r.passed]
    logger.info(f"{len(reports) - len(failed)}/{len(reports)} identity checks passed")
    for r in failed:
        logger.warning(f"{r.name} at k={r.k}: defect {r.defect:.3e} >= {r.tolerance:.1e}")
    return reports


def check_series_vs_closed(lam: float, tol: float = DEFAULT_TOL):
    """(S, D) of the infinite chain: ladder series against the elliptic closed forms."""
    c = Coupling.from_lambda(lam)
    s = fermion_spectrum(c)
    S_series, n_S = _sum(s, infinite_entropy.entropy_summand, power=1)
    D_series, n_D = _sum(s, infinite_entropy.dispersion_summand, power=2)
    S_closed = infinite_entropy.entropy_elliptic(c)
    D_closed = infinite_entropy.dispersion_elliptic(c)
    return (
        IdentityReport.compare("S_series", c.k, S_series, S_closed, n_S, tol, lam=c.lam),
        IdentityReport.compare("D_series", c.k, D_series, D_closed, n_D, tol, lam=c.lam),
    )
