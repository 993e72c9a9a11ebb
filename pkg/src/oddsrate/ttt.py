"""Empirical total-time-on-test transform with exponent 2.

For an ordered sample the transform at ``k / n`` is

    T(k/n) = sum_{j<=k} ((n - j + 1) / n)**2 * (X(j) - X(j-1)),   X(0) = 0,

which equals the integral of ``(1 - Fn(t))**2`` over ``[0, X(k)]``. Between
the grid points ``k / n`` it is interpolated linearly.
"""

from __future__ import annotations

import numpy as np

from .functions import PiecewiseLinearFunction, SampleError, SortedSample, StepFunction

__all__ = [
    "empirical_cdf",
    "ttt_inverse",
    "normalize_ttt",
    "invert_pl",
    "ttt_ordinates",
]


def empirical_cdf(sample: SortedSample) -> StepFunction:
    """Right-continuous empirical CDF; ties give a single multiple jump."""
    values = sample.values
    n = sample.n
    distinct, first = np.unique(values, return_index=True)
    # count of observations <= each distinct value
    upto = np.append(first[1:], n)
    return StepFunction(distinct, upto / n, before=0.0)


def _cumsum_compensated(terms) -> np.ndarray:
    # Neumaier summation, keeping every partial sum.
    out = np.empty(len(terms) + 1)
    out[0] = 0.0
    total = 0.0
    comp = 0.0
    for k, term in enumerate(terms, start=1):
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        out[k] = total + comp
    return out


def ttt_ordinates(values: np.ndarray) -> np.ndarray:
    """Transform ordinates at ``0, 1/n, ..., 1`` for sorted ``values``."""
    n = values.size
    gaps = np.diff(values, prepend=0.0)
    weights = ((n - np.arange(n)) / n) ** 2
    return _cumsum_compensated((weights * gaps).tolist())


def ttt_inverse(sample: SortedSample) -> PiecewiseLinearFunction:
    """Piecewise-linear empirical transform on the grid ``k / n``."""
    n = sample.n
    return PiecewiseLinearFunction(np.arange(n + 1) / n, ttt_ordinates(sample.values))


def normalize_ttt(t_inv: PiecewiseLinearFunction) -> PiecewiseLinearFunction:
    """Scale ordinates by the value at the right end so that 1 maps to 1."""
    total = float(t_inv.y[-1])
    if not total > 0:
        raise SampleError("degenerate sample: transform vanishes (all observations zero)")
    y = t_inv.y / total
    y[-1] = 1.0
    return PiecewiseLinearFunction(t_inv.x, y)


def invert_pl(f: PiecewiseLinearFunction) -> PiecewiseLinearFunction:
    """Swap abscissae and ordinates of a nondecreasing piecewise-linear map.

    A flat run of equal ordinates (from tied observations) has no inverse;
    it is collapsed to its leftmost knot, so the inverse jumps there.
    """
    y = f.y
    if np.any(np.diff(y) < 0):
        raise ValueError("cannot invert a function with decreasing ordinates")
    keep = np.ones(y.size, dtype=bool)
    keep[1:] = np.diff(y) > 0
    return PiecewiseLinearFunction(y[keep], f.x[keep])
