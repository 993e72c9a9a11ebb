"""Least concave majorants and greatest convex minorants of knot sets.

Both hulls come from a single monotone-chain scan. Turn tests compare
cross-products of coordinate differences, never ratios, and collinear knots
are dropped from the hull so consecutive hull slopes are strictly monotone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functions import PiecewiseLinearFunction

__all__ = [
    "MajorantResult",
    "lcm",
    "gcm",
    "right_slope",
    "left_slope",
    "hull_indices",
    "hull_ordinates",
    "hull_right_slopes",
]


@dataclass(frozen=True)
class MajorantResult:
    hull: PiecewiseLinearFunction
    support_indices: np.ndarray


def hull_indices(xs: list, ys: list, upper: bool) -> list[int]:
    """Indices of hull vertices of ``(xs, ys)``; upper hull if ``upper``."""
    sign = 1.0 if upper else -1.0
    stack: list[int] = []
    for i in range(len(xs)):
        xi, yi = xs[i], ys[i]
        while len(stack) >= 2:
            j, k = stack[-2], stack[-1]
            cross = (xs[k] - xs[j]) * (yi - ys[j]) - (ys[k] - ys[j]) * (xi - xs[j])
            # upper hull keeps strict right turns only
            if sign * cross >= 0:
                stack.pop()
            else:
                break
        stack.append(i)
    return stack


def _points(points) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(points, PiecewiseLinearFunction):
        x, y = points.x, points.y
    else:
        x, y = points
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("a hull needs at least two knots")
    if x.shape != y.shape or np.any(np.diff(x) <= 0):
        raise ValueError("knot abscissae must be strictly increasing")
    return x, y


def _hull(points, upper: bool) -> MajorantResult:
    x, y = _points(points)
    idx = np.asarray(hull_indices(x.tolist(), y.tolist(), upper), dtype=np.intp)
    return MajorantResult(PiecewiseLinearFunction(x[idx], y[idx]), idx)


def lcm(points) -> MajorantResult:
    """Least concave majorant of ``points`` (a function or an ``(x, y)`` pair)."""
    return _hull(points, upper=True)


def gcm(points) -> MajorantResult:
    """Greatest convex minorant of ``points``."""
    return _hull(points, upper=False)


def right_slope(f: PiecewiseLinearFunction, x: float) -> float:
    return f.right_slope(x)


def left_slope(f: PiecewiseLinearFunction, x: float) -> float:
    return f.left_slope(x)


def hull_ordinates(x: np.ndarray, y: np.ndarray, upper: bool) -> np.ndarray:
    """Hull values at every input abscissa; fast path used by the statistics."""
    idx = hull_indices(x.tolist(), y.tolist(), upper)
    return np.interp(x, x[idx], y[idx])


def hull_right_slopes(x: np.ndarray, y: np.ndarray, upper: bool) -> np.ndarray:
    """Right slope of the hull at each of ``x[:-1]``."""
    idx = np.asarray(hull_indices(x.tolist(), y.tolist(), upper), dtype=np.intp)
    seg = np.diff(y[idx]) / np.diff(x[idx])
    # segment index containing [x[i], x[i+1])
    which = np.searchsorted(idx, np.arange(x.size - 1), side="right") - 1
    return seg[which]

