"""Bracketed scalar minimizer used to cross-check the closed-form inner problems.

A dense grid locates the basin, then golden-section search refines inside the
two grid cells around the incumbent. The returned point is never worse than the
best grid point.
"""

import math
from typing import Callable, Tuple

import numpy as np

from ..errors import NumericalFailure

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2

DEFAULT_GRID_POINTS = 10_001
DEFAULT_TOL = 1e-10


def _evaluate_grid(objective: Callable, grid: np.ndarray) -> np.ndarray:
    # Objectives built from the array kernels accept the whole grid at once.
    try:
        values = np.asarray(objective(grid), dtype=float)
    except (TypeError, ValueError):
        values = None
    if values is None or values.shape != grid.shape:
        values = np.array([float(objective(float(x))) for x in grid])
    return values


def _checked(value: float, at: float) -> float:
    if not math.isfinite(value):
        raise NumericalFailure(f"objective is not finite at lambda={at!r}: {value!r}")
    return value


def golden_section(objective: Callable[[float], float], a: float, b: float, tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """Golden-section search on [a, b].

    Returns (argmin, value) for the midpoint of the final interval, whose width
    is at most tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        mid = 0.5 * (a + b)
        return mid, _checked(float(objective(mid)), mid)

    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = _checked(float(objective(c)), c)
    yd = _checked(float(objective(d)), d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = _checked(float(objective(c)), c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = _checked(float(objective(d)), d)

    if yc < yd:
        lo, hi = a, d
    else:
        lo, hi = c, b
    mid = 0.5 * (lo + hi)
    return mid, _checked(float(objective(mid)), mid)


def scalar_minimize(
    objective: Callable,
    bracket: Tuple[float, float],
    tol: float = DEFAULT_TOL,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> Tuple[float, float]:
    """Minimize a continuous scalar function of lambda on a finite bracket.

    Args:
        objective: function of lambda; may accept a numpy array for the grid pass
        bracket: (lo, hi), finite
        tol: final interval width for the golden-section refinement
        grid_points: size of the bracketing grid (at least 1e4 points)

    Returns:
        (argmin, min_value) with min_value <= the grid minimum.

    Raises:
        ValueError: bracket is not finite or grid_points < 3
        NumericalFailure: the objective returned a nonfinite value
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError(f"bracket must be finite, got {bracket!r}")
    if grid_points < 3:
        raise ValueError(f"grid_points must be >= 3, got {grid_points}")
    lo, hi = min(lo, hi), max(lo, hi)

    grid = np.linspace(lo, hi, grid_points)
    values = _evaluate_grid(objective, grid)
    bad = ~np.isfinite(values)
    if bad.any():
        at = float(grid[np.argmax(bad)])
        raise NumericalFailure(f"objective is not finite at lambda={at!r}")

    best = int(np.argmin(values))
    best_x, best_value = float(grid[best]), float(values[best])

    left = grid[max(best - 1, 0)]
    right = grid[min(best + 1, grid_points - 1)]
    refined_x, refined_value = golden_section(objective, float(left), float(right), tol)

    if refined_value <= best_value:
        return refined_x, refined_value
    return best_x, best_value
