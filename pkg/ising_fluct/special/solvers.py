"""
Bracketed root finding and 1-d maximisation on top of scipy.optimize.

Both start from a coarse grid: the quantities we scan vary over several
decades of |1 - lambda|, so brackets are taken from sign changes / grid
maxima instead of guessed.
"""

from dataclasses import dataclass
from logging import getLogger
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy import optimize

from ising_fluct.exceptions import BracketError, NonConvergenceError

logger = getLogger("Solvers")


@dataclass(frozen=True)
class RootResult:
    root: float
    bracket: Tuple[float, float]
    iterations: int
    function_calls: int

    @property
    def bracket_width(self) -> float:
        return self.bracket[1] - self.bracket[0]


@dataclass(frozen=True)
class ExtremumResult:
    x: float
    value: float
    at_boundary: bool
    bracket: Tuple[float, float]

    @property
    def bracket_width(self) -> float:
        return self.bracket[1] - self.bracket[0]


def scan_bracket(f: Callable[[float], float], grid: Sequence[float]):
    """First adjacent pair of grid points where f changes sign."""
    grid = np.asarray(grid, dtype=float)
    values = np.array([f(x) for x in grid])
    sign_change = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)[0]
    if len(sign_change) == 0:
        msg = (
            f"no sign change of {getattr(f, '__name__', 'f')} on "
            f"[{grid[0]}, {grid[-1]}] ({len(grid)} points)"
        )
        logger.error(msg)
        raise BracketError(msg)
    ii = sign_change[0]
    return float(grid[ii]), float(grid[ii + 1])


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-12,
    max_iter: int = 500,
) -> RootResult:
    f_lo, f_hi = f(lo), f(hi)
    if f_lo * f_hi > 0:
        msg = f"root not bracketed: f({lo})={f_lo}, f({hi})={f_hi}"
        logger.error(msg)
        raise BracketError(msg)

    root, info = optimize.brentq(
        f, lo, hi, xtol=xtol, maxiter=max_iter, full_output=True, disp=False
    )
    if not info.converged:
        msg = f"brentq stopped after {info.iterations} iterations: {info.flag}"
        logger.error(msg)
        raise NonConvergenceError(msg)

    # certify the result with an explicit sign change around the root
    half_width = xtol
    while half_width < hi - lo:
        a, b = max(lo, root - half_width), min(hi, root + half_width)
        if f(a) * f(b) <= 0:
            break
        half_width *= 2.0
    else:
        a, b = lo, hi

    logger.debug(f"root {root!r} in [{a!r}, {b!r}] after {info.iterations} iterations")
    return RootResult(
        root=float(root),
        bracket=(float(a), float(b)),
        iterations=info.iterations,
        function_calls=info.function_calls,
    )


def find_maximum(
    f: Callable[[float], float], grid: Sequence[float], xtol: float = 1e-6
) -> ExtremumResult:
    """
    Grid argmax refined by golden-section search between its neighbours.

    A maximum on the first/last grid point is returned unrefined with
    `at_boundary=True`.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.array([f(x) for x in grid])
    ii = int(np.argmax(values))

    if ii == 0 or ii == len(grid) - 1:
        msg = f"maximum sits on the scan boundary x={grid[ii]} of [{grid[0]}, {grid[-1]}]"
        logger.warning(msg)
        return ExtremumResult(
            x=float(grid[ii]),
            value=float(values[ii]),
            at_boundary=True,
            bracket=(float(grid[max(ii - 1, 0)]), float(grid[min(ii + 1, len(grid) - 1)])),
        )

    a, b, c = grid[ii - 1], grid[ii], grid[ii + 1]

    def neg_f(x):
        return -f(x)

    # golden's xtol is relative to |x|
    rel_xtol = xtol / max(abs(b), 1.0) / 2.0
    try:
        result = optimize.minimize_scalar(
            neg_f, bracket=(a, b, c), method="golden", options={"xtol": rel_xtol}
        )
    except ValueError:
        # flat plateau in the grid values: golden needs a strict bracket
        logger.debug("golden bracket rejected, fall back to bounded Brent")
        result = optimize.minimize_scalar(
            neg_f, bounds=(a, c), method="bounded", options={"xatol": xtol}
        )

    x = float(result.x)
    value = -float(result.fun)
    if value < values[ii]:
        x, value = float(b), float(values[ii])
    return ExtremumResult(x=x, value=value, at_boundary=False, bracket=(float(a), float(c)))
