"""Shape-constrained estimation of a lifetime distribution with increasing odds rate.

The odds-rate estimate is the reciprocal of the right slope of the least
concave majorant of the empirical transform, read off at ``Fn(x)``. It is a
nondecreasing step function with steps at the observations, equal to zero
left of the origin and to ``+inf`` from the largest observation onward.
Integrating it gives a convex, piecewise-linear odds function, and mapping
the odds through ``L(t) = t / (1 + t)`` gives the CDF estimate. The CDF puts
an atom at the largest observation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functions import (
    DomainError,
    PiecewiseLinearFunction,
    SampleError,
    SortedSample,
    StepFunction,
)
from .geometry import MajorantResult, hull_indices, lcm
from .ttt import ttt_inverse, ttt_ordinates

__all__ = [
    "IorEstimate",
    "fit_ior",
    "eval_cdf",
    "eval_pdf",
    "eval_odds",
    "eval_odds_rate",
]


def _interval_rates(values: np.ndarray) -> np.ndarray:
    """Odds-rate estimate on each ``[X(i), X(i+1))``, ``i = 0..n-1``."""
    n = values.size
    T = ttt_ordinates(values)
    p = np.arange(n + 1) / n
    idx = np.asarray(hull_indices(p.tolist(), T.tolist(), True), dtype=np.intp)
    with np.errstate(divide="ignore", over="ignore"):
        # reciprocal hull slope, written as (index span / n) / rise
        seg = np.diff(idx) / (n * np.diff(T[idx]))
    which = np.searchsorted(idx, np.arange(n), side="right") - 1
    return seg[which]


def _odds_knots(values: np.ndarray):
    """Distinct knots ``0 < ... < X(n)`` with the odds estimate and step values.

    Returns ``(x, Lambda, starts, rates)`` where ``Lambda[-1]`` is the left
    limit at the largest observation.
    """
    rates = _interval_rates(values)
    gaps = np.diff(values, prepend=0.0)
    keep = gaps > 0
    with np.errstate(invalid="ignore"):
        # a tied observation gives an empty interval, possibly with rate inf
        increments = np.where(keep, rates * gaps, 0.0)
    cum = np.cumsum(increments)
    x = np.concatenate(([0.0], values[keep]))
    Lam = np.concatenate(([0.0], cum[keep]))
    starts = np.concatenate(([0.0], values[:-1]))[keep]
    return x, Lam, starts, rates[keep]


@dataclass(frozen=True)
class IorEstimate:
    """Fitted odds rate, odds function, CDF and density.

    Attributes
    ----------
    lambda_tilde : StepFunction
        Nondecreasing odds-rate estimate, ``+inf`` from ``top`` on.
    Lambda_tilde : PiecewiseLinearFunction
        Convex odds estimate on ``[0, top]``; the value at ``top`` is the
        left limit.
    top : float
        Largest observation, where the CDF estimate has an atom.
    hull : MajorantResult or None
        Least concave majorant of the empirical transform (``None`` for a
        single observation).
    """

    sample: SortedSample
    lambda_tilde: StepFunction
    Lambda_tilde: PiecewiseLinearFunction
    top: float
    hull: MajorantResult | None

    @property
    def n(self) -> int:
        return self.sample.n

    @property
    def cdf_below_top(self) -> float:
        """Left limit of the CDF estimate at the largest observation."""
        lam = float(self.Lambda_tilde.y[-1])
        return lam / (1.0 + lam)

    @property
    def jump_mass(self) -> float:
        return 1.0 - self.cdf_below_top

    def odds(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < self.top)
        out = np.interp(np.clip(x, 0.0, self.top), self.Lambda_tilde.x, self.Lambda_tilde.y)
        out = np.where(inside, out, np.where(x <= 0, 0.0, math.inf))
        return float(out) if out.ndim == 0 else out

    def odds_rate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= 0, 0.0, self.lambda_tilde(x))
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        lam = np.interp(np.clip(x, 0.0, self.top), self.Lambda_tilde.x, self.Lambda_tilde.y)
        with np.errstate(invalid="ignore"):
            prob = np.where(np.isinf(lam), 1.0, lam / (1.0 + lam))
        out = np.where(x <= 0, 0.0, prob)
        out = np.where(x >= self.top, 1.0, out)
        return float(out) if out.ndim == 0 else out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x >= self.top):
            raise DomainError(
                "density undefined at or beyond the largest observation: "
                "the CDF estimate has an atom there"
            )
        lam = self.odds(x)
        out = np.where(x <= 0, 0.0, self.odds_rate(x) / (1.0 + lam) ** 2)
        return float(out) if out.ndim == 0 else out


def fit_ior(sample: SortedSample) -> IorEstimate:
    """Fit the increasing-odds-rate estimator to a sorted sample.

    Examples
    --------
    >>> est = fit_ior(SortedSample([1.0, 3.0]))
    >>> est.cdf(2.0)
    0.6
    >>> round(est.jump_mass, 12)
    0.285714285714
    """
    if not isinstance(sample, SortedSample):
        sample = SortedSample.from_values(sample)
    values = sample.values
    top = sample.top
    if sample.n == 1 or top == 0:
        # Point mass at the (only) observed value.
        if top > 0:
            rate = StepFunction([0.0], [0.0], infinite_from=top)
            odds = PiecewiseLinearFunction([0.0, top], [0.0, 0.0])
        else:
            rate = StepFunction([], [], infinite_from=0.0)
            odds = PiecewiseLinearFunction([0.0], [0.0])
        return IorEstimate(sample, rate, odds, top, hull=None)
    x, Lam, starts, rates = _odds_knots(values)
    return IorEstimate(
        sample=sample,
        lambda_tilde=StepFunction(starts, rates, before=0.0, infinite_from=top),
        Lambda_tilde=PiecewiseLinearFunction(x, Lam),
        top=top,
        hull=lcm(ttt_inverse(sample)),
    )


def eval_cdf(est: IorEstimate, x):
    return est.cdf(x)


def eval_pdf(est: IorEstimate, x):
    return est.pdf(x)


def eval_odds(est: IorEstimate, x):
    return est.odds(x)


def eval_odds_rate(est: IorEstimate, x):
    return est.odds_rate(x)


def require_nondegenerate(sample: SortedSample) -> None:
    if sample.n < 2:
        raise SampleError("at least two observations are required")
    if sample.values[0] == sample.values[-1]:
        raise SampleError("degenerate sample: all observations are equal")
