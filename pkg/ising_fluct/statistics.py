"""
Moments of the entropy operator S^ = -ln(rho).

    S  = <S^>              (nats)
    D  = <(S^ - S)^2>
    dS = sqrt(D),  delta = dS / S
"""

import math
from dataclasses import dataclass
from logging import getLogger
from typing import Optional

import numpy as np
from scipy.special import xlogy

from ising_fluct.exceptions import DomainError, NormalizationError

logger = getLogger("EntropyStatistics")

UNDEFINED_DELTA_BELOW = 1e-14
NORMALIZATION_ATOL = 1e-12


@dataclass(frozen=True)
class EntropyStats:
    S: float
    D: float
    dS: float
    delta: Optional[float]  # None where S = 0: relative fluctuation undefined
    second_moment: float

    @classmethod
    def from_moments(cls, S: float, D: float):
        if D < 0.0:
            msg = f"negative dispersion D={D}"
            logger.error(msg)
            raise DomainError(msg)
        dS = math.sqrt(D)
        delta = dS / S if S >= UNDEFINED_DELTA_BELOW else None
        return cls(S=S, D=D, dS=dS, delta=delta, second_moment=D + S * S)

    def as_dict(self) -> dict:
        return {
            "S": self.S,
            "D": self.D,
            "dS": self.dS,
            "delta": self.delta,
            "second_moment": self.second_moment,
        }


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Eigenvalues of a reduced density matrix, descending."""

    probs: np.ndarray

    @classmethod
    def from_probabilities(cls, probs, atol: float = NORMALIZATION_ATOL):
        probs = np.asarray(probs, dtype=float).ravel()
        if len(probs) == 0:
            msg = "empty spectrum"
            logger.error(msg)
            raise NormalizationError(msg)
        if np.any(probs < 0.0) or not np.all(np.isfinite(probs)):
            msg = f"spectrum has negative or non-finite entries: {probs.min()}"
            logger.error(msg)
            raise NormalizationError(msg)
        total = probs.sum()
        if abs(total - 1.0) > atol:
            msg = f"spectrum sums to {total!r}, not 1 (atol={atol})"
            logger.error(msg)
            raise NormalizationError(msg)
        return cls(probs=np.sort(probs)[::-1])

    def __len__(self):
        return len(self.probs)


def entropy_stats_from_spectrum(p: SchmidtSpectrum) -> EntropyStats:
    probs = p.probs
    if abs(probs.sum() - 1.0) > NORMALIZATION_ATOL:
        msg = f"spectrum sums to {probs.sum()!r}, not 1"
        logger.error(msg)
        raise NormalizationError(msg)

    S = float(-np.sum(xlogy(probs, probs))) + 0.0  # no -0.0 for pure states
    # centred form of sum p (ln p)^2 - S^2; equal in exact arithmetic, no cancellation
    nonzero = probs[probs > 0.0]
    D = float(np.sum(nonzero * (np.log(nonzero) + S) ** 2))
    return EntropyStats.from_moments(S, D)
