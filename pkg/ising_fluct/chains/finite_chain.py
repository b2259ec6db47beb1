"""
Exact diagonalisation of the open chain

    H = - sum_{i=1}^{L} s_i^x - lambda sum_{i=1}^{L-1} s_i^z s_{i+1}^z

in the z-product basis. Site i lives on bit (L - i) of the basis index,
bit 0 meaning s^z = +1, so index order matches |1,1>, |1,-1>, ... of the
dimer and a C-order reshape puts sites 1..cut on the row index.
"""

import math
from dataclasses import dataclass, field
from logging import getLogger
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ising_fluct.exceptions import DomainError, NonConvergenceError
from ising_fluct.special.solvers import ExtremumResult, find_maximum
from ising_fluct.statistics import (
    EntropyStats,
    SchmidtSpectrum,
    entropy_stats_from_spectrum,
)

logger = getLogger("FiniteChain")

MIN_SITES = 2
MAX_SITES = 14
DENSE_MAX_SITES = 4  # "auto" solves these with a dense eigensolver
DENSE_BUILD_MAX_SITES = 10
MAX_ITER = 10_000
RESIDUAL_TOL = 1e-10
SCHMIDT_CUTOFF = 1e-16
SCAN_POINTS = 200
SCAN_XTOL = 1e-4
LAMBDA_RANGE = (0.2, 3.0)


@dataclass(frozen=True)
class ChainSpec:
    L: int
    lam: float
    cut: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.L, (int, np.integer)) or not MIN_SITES <= self.L <= MAX_SITES:
            msg = f"chain length L={self.L} must be an integer in [{MIN_SITES}, {MAX_SITES}]"
            logger.error(msg)
            raise DomainError(msg)
        if not math.isfinite(self.lam):
            msg = f"coupling lambda={self.lam} must be finite"
            logger.error(msg)
            raise DomainError(msg)
        if self.cut is None:
            object.__setattr__(self, "cut", self.L // 2)
        if not 1 <= self.cut <= self.L - 1:
            msg = f"cut={self.cut} must be in [1, {self.L - 1}] for L={self.L}"
            logger.error(msg)
            raise DomainError(msg)

    @property
    def dim(self) -> int:
        return 2**self.L


@dataclass(frozen=True)
class GroundState:
    energy: float
    amplitudes: np.ndarray = field(repr=False)
    residual: float = 0.0

    @property
    def L(self) -> int:
        return int(round(math.log2(len(self.amplitudes))))


def _spins(L: int) -> np.ndarray:
    """(2^L, L) array of s^z = +-1, column i-1 for site i."""
    index = np.arange(2**L)
    shifts = L - np.arange(1, L + 1)
    bits = (index[:, None] >> shifts[None, :]) & 1
    return 1 - 2 * bits


def _diagonal(spec: ChainSpec) -> np.ndarray:
    spins = _spins(spec.L)
    agreement = np.sum(spins[:, :-1] * spins[:, 1:], axis=1)
    return -spec.lam * agreement.astype(float)


def _flip_indices(L: int):
    index = np.arange(2**L)
    return [index ^ (1 << (L - i)) for i in range(1, L + 1)]


def build_hamiltonian(spec: ChainSpec) -> LinearOperator:
    """Matrix-free H: diagonal bond energies plus -1 to every single-spin flip."""
    diagonal = _diagonal(spec)
    flips = _flip_indices(spec.L)

    def matvec(psi):
        psi = np.ravel(psi)
        out = diagonal * psi
        for flipped in flips:
            out -= psi[flipped]
        return out

    return LinearOperator((spec.dim, spec.dim), matvec=matvec, rmatvec=matvec, dtype=float)


def dense_hamiltonian(spec: ChainSpec) -> np.ndarray:
    if spec.L > DENSE_BUILD_MAX_SITES:
        msg = f"dense H refused for L={spec.L} > {DENSE_BUILD_MAX_SITES}"
        logger.error(msg)
        raise DomainError(msg)
    H = np.diag(_diagonal(spec))
    rows = np.arange(spec.dim)
    for flipped in _flip_indices(spec.L):
        H[rows, flipped] -= 1.0
    return H


def _fix_sign(psi: np.ndarray) -> np.ndarray:
    # Perron-Frobenius: off-diagonals are all <= 0, so the ground state is positive
    psi = psi / np.linalg.norm(psi)
    return -psi if psi.sum() < 0.0 else psi


def ground_state(
    spec: ChainSpec, method: str = "auto", max_iter: int = MAX_ITER
) -> GroundState:
    """
    Lowest eigenpair. method: "auto" (dense for L <= 4, else Lanczos),
    "dense" or "lanczos". Lanczos starts from the normalised all-ones vector.
    """
    if method == "auto":
        method = "dense" if spec.L <= DENSE_MAX_SITES else "lanczos"

    H = build_hamiltonian(spec)
    if method == "dense":
        energies, vectors = np.linalg.eigh(dense_hamiltonian(spec))
        energy, psi = float(energies[0]), vectors[:, 0]
    elif method == "lanczos":
        v0 = np.full(spec.dim, 1.0 / math.sqrt(spec.dim))
        try:
            energies, vectors = eigsh(H, k=1, which="SA", v0=v0, maxiter=max_iter, tol=0)
        except ArpackNoConvergence as e:
            msg = (
                f"Lanczos did not converge for L={spec.L}, lambda={spec.lam} "
                f"after {max_iter} iterations (near-degenerate ground state?)"
            )
            logger.error(msg)
            raise NonConvergenceError(msg) from e
        energy, psi = float(energies[0]), vectors[:, 0]
    else:
        msg = f"unknown eigensolver method '{method}'"
        logger.error(msg)
        raise DomainError(msg)

    psi = _fix_sign(psi)
    residual = float(np.linalg.norm(H.matvec(psi) - energy * psi))
    if residual > RESIDUAL_TOL * max(1.0, abs(energy)):
        msg = f"ground state residual {residual:.3e} too large (L={spec.L}, lambda={spec.lam})"
        logger.error(msg)
        raise NonConvergenceError(msg)

    logger.debug(f"L={spec.L} lambda={spec.lam}: E0={energy:.12f} residual={residual:.2e}")
    return GroundState(energy=energy, amplitudes=psi, residual=residual)


def schmidt_spectrum(g: Union[GroundState, np.ndarray], cut: int) -> SchmidtSpectrum:
    """Squared singular values of the amplitudes reshaped to 2^cut x 2^(L-cut)."""
    amplitudes = g.amplitudes if isinstance(g, GroundState) else np.asarray(g, dtype=float)
    L = int(round(math.log2(len(amplitudes))))
    if 2**L != len(amplitudes):
        msg = f"{len(amplitudes)} amplitudes is not a power of 2"
        logger.error(msg)
        raise DomainError(msg)
    if not 1 <= cut <= L - 1:
        msg = f"cut={cut} must be in [1, {L - 1}]"
        logger.error(msg)
        raise DomainError(msg)

    matrix = amplitudes.reshape(2**cut, 2 ** (L - cut))
    probs = scipy.linalg.svdvals(matrix) ** 2
    return SchmidtSpectrum.from_probabilities(probs[probs >= SCHMIDT_CUTOFF])


def chain_stats(spec: ChainSpec, max_iter: int = MAX_ITER) -> EntropyStats:
    g = ground_state(spec, max_iter=max_iter)
    return entropy_stats_from_spectrum(schmidt_spectrum(g, spec.cut))


def max_fluctuation_position(
    L: int,
    lambda_range: Tuple[float, float] = LAMBDA_RANGE,
    scan_points: int = SCAN_POINTS,
    xtol: float = SCAN_XTOL,
    max_iter: int = MAX_ITER,
) -> ExtremumResult:
    """Position of the dS maximum for a half-cut chain of length L."""

    def fluctuation(lam):
        return chain_stats(ChainSpec(L=L, lam=float(lam)), max_iter=max_iter).dS

    grid = np.linspace(*lambda_range, scan_points)
    result = find_maximum(fluctuation, grid, xtol=xtol)
    if result.at_boundary:
        logger.warning(f"L={L}: dS maximum on the edge of {lambda_range}")
    logger.info(f"L={L}: dS maximum at lambda={result.x:.5f} (dS={result.value:.6f})")
    return result
