"""
Free-fermion description of the half-chain reduced density matrix.

    rho = exp(-sum_j eps_j n_j) / Z,    Z = prod_j (1 + exp(-eps_j))

with an equidistant ladder eps_j = (2j+1) eps below the critical point and
eps_j = 2j eps above it. eps = pi K(k') / K(k), k = min(lambda, 1/lambda).
"""

import math
from dataclasses import dataclass
from enum import Enum
from logging import getLogger
from typing import Callable, Tuple

import numpy as np
from scipy.special import expit

from ising_fluct.exceptions import CriticalPointError, DomainError, NonConvergenceError
from ising_fluct.special.elliptic import EllipticPair, elliptic_pair

logger = getLogger("FreeFermion")

DEFAULT_TOL = 1e-14
DEFAULT_MAX_TERMS = 10_000_000
BLOCK_SIZE = 256


class Phase(Enum):
    DISORDERED = "disordered"
    ORDERED = "ordered"
    CRITICAL = "critical"


class Branch(Enum):
    ODD = "odd"
    EVEN = "even"


@dataclass(frozen=True)
class Coupling:
    """Spin-spin interaction lambda at unit transverse field."""

    lam: float
    k: float
    phase: Phase

    @classmethod
    def from_lambda(cls, lam: float):
        lam = float(lam)
        if not math.isfinite(lam) or lam <= 0.0:
            msg = f"coupling lambda={lam} must be finite and > 0"
            logger.error(msg)
            raise DomainError(msg)
        if lam < 1.0:
            return cls(lam=lam, k=lam, phase=Phase.DISORDERED)
        if lam > 1.0:
            return cls(lam=lam, k=1.0 / lam, phase=Phase.ORDERED)
        return cls(lam=lam, k=1.0, phase=Phase.CRITICAL)

    @property
    def is_critical(self) -> bool:
        return self.phase is Phase.CRITICAL

    def require_noncritical(self):
        if self.is_critical:
            error = CriticalPointError()
            logger.error(str(error))
            raise error

    def elliptic(self) -> EllipticPair:
        self.require_noncritical()
        return elliptic_pair(self.k)


def as_coupling(c) -> Coupling:
    if isinstance(c, Coupling):
        return c
    return Coupling.from_lambda(c)


@dataclass(frozen=True)
class FermionSpectrum:
    epsilon: float
    branch: Branch

    def __post_init__(self):
        if not self.epsilon > 0.0:
            msg = f"level spacing must be > 0, got {self.epsilon}"
            logger.error(msg)
            raise DomainError(msg)

    @property
    def step(self) -> float:
        return 2.0 * self.epsilon

    def levels(self, j: np.ndarray) -> np.ndarray:
        j = np.asarray(j, dtype=float)
        if self.branch is Branch.ODD:
            return (2.0 * j + 1.0) * self.epsilon
        return 2.0 * j * self.epsilon


def level_spacing(c) -> float:
    c = as_coupling(c)
    pair = c.elliptic()
    return math.pi * pair.K_prime / pair.K


def fermion_spectrum(c) -> FermionSpectrum:
    c = as_coupling(c)
    branch = Branch.ODD if c.phase is Phase.DISORDERED else Branch.EVEN
    return FermionSpectrum(epsilon=level_spacing(c), branch=branch)


def excitation(j: int, s: FermionSpectrum) -> float:
    if j < 0:
        msg = f"ladder index j={j} must be >= 0"
        logger.error(msg)
        raise DomainError(msg)
    return float(s.levels(j))


def ladder_sum(
    s: FermionSpectrum,
    summand: Callable[[np.ndarray], np.ndarray],
    tol: float = DEFAULT_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
    power: int = 0,
    rate: float = 1.0,
) -> Tuple[float, int]:
    """
    Sum summand(eps_j) over the ladder, returning (sum, terms used).

    The summand must be bounded by ~ x**power * exp(-rate * x) for large x.
    Summation stops after the first term whose geometric tail majorant
    t_j r_j / (1 - r_j), with r_j = (1 + step/x_j)**power exp(-rate step)
    (1 + exp(-rate x_j))**2, is below tol.
    """
    if not tol > 0.0:
        msg = f"tolerance must be > 0, got {tol}"
        logger.error(msg)
        raise DomainError(msg)

    total = 0.0
    start = 0
    decay = math.exp(-rate * s.step)
    while start < max_terms:
        j = np.arange(start, min(start + BLOCK_SIZE, max_terms))
        x = s.levels(j)
        terms = summand(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            growth = np.where(x > 0.0, (1.0 + s.step / x) ** power, np.inf)
            ratio = growth * decay * (1.0 + np.exp(-rate * x)) ** 2
            tail = np.where(ratio < 1.0, np.abs(terms) * ratio / (1.0 - ratio), np.inf)
        done = np.nonzero(tail < tol)[0]
        if len(done) > 0:
            stop = done[0] + 1
            total += float(np.sum(terms[:stop]))
            n_terms = start + int(stop)
            logger.debug(f"ladder sum eps={s.epsilon:.6g}: {n_terms} terms")
            return total, n_terms
        total += float(np.sum(terms))
        start += len(j)

    msg = (
        f"ladder sum with eps={s.epsilon!r} ({s.branch.value}) did not reach "
        f"tol={tol} within {max_terms} terms"
    )
    logger.error(msg)
    raise NonConvergenceError(msg)


def _log_occupation(x):
    return np.log1p(np.exp(-x))


def _mean_occupation_energy(x):
    return x * expit(-x)


def log_partition(
    s: FermionSpectrum, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS
) -> float:
    """ln Z = sum_j ln(1 + exp(-eps_j))."""
    value, _ = ladder_sum(s, _log_occupation, tol=tol, max_terms=max_terms)
    return value


def mean_energy(
    s: FermionSpectrum, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS
) -> float:
    """<H'> = sum_j eps_j / (1 + exp(eps_j))."""
    value, _ = ladder_sum(
        s, _mean_occupation_energy, tol=tol, max_terms=max_terms, power=1
    )
    return value


def occupation_probabilities(s: FermionSpectrum, n_modes: int) -> np.ndarray:
    """Mean occupation 1 / (1 + exp(eps_j)) of the first n_modes ladder modes."""
    return expit(-s.levels(np.arange(n_modes)))
