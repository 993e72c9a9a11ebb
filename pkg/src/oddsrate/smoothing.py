"""Kernel-smoothed odds rate, odds, CDF and density.

The step odds-rate estimate is convolved with a scaled kernel
``k_h(u) = k(u / h) / h``. Because the step function is a sum of jumps, the
convolution is the Stieltjes sum ``sum_i d_i * K_h(x - s_i)`` over jump
locations ``s_i`` and sizes ``d_i``, and its integral is the same sum with
``K_h`` replaced by its antiderivative. Both are exact and evaluated lazily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimator import IorEstimate
from .functions import DomainError

__all__ = [
    "KernelSpec",
    "kernel_pdf",
    "kernel_cdf",
    "kernel_cdf_integral",
    "smoothed_odds_rate",
    "smoothed_odds",
    "smoothed_cdf",
    "smoothed_pdf",
]

_KINDS = ("epanechnikov",)


@dataclass(frozen=True)
class KernelSpec:
    bandwidth: float
    kind: str = "epanechnikov"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kernel {self.kind!r}; available: {_KINDS}")
        if not (math.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ValueError("bandwidth must be positive")


def kernel_pdf(kernel: KernelSpec, y):
    """``k_h(y) = (3 / 4h) (1 - (y/h)^2)`` on ``[-h, h]``."""
    u = np.asarray(y, dtype=float) / kernel.bandwidth
    out = np.where(np.abs(u) <= 1, 0.75 * (1 - u * u), 0.0) / kernel.bandwidth
    return float(out) if out.ndim == 0 else out


def kernel_cdf(kernel: KernelSpec, y):
    u = np.clip(np.asarray(y, dtype=float) / kernel.bandwidth, -1.0, 1.0)
    out = 0.5 + 0.75 * u - 0.25 * u**3
    return float(out) if out.ndim == 0 else out


def kernel_cdf_integral(kernel: KernelSpec, y):
    """Antiderivative of ``K_h`` vanishing left of ``-h``; equals ``y`` beyond ``h``."""
    h = kernel.bandwidth
    y = np.asarray(y, dtype=float)
    u = np.clip(y / h, -1.0, 1.0)
    inner = h * (3.0 / 16 + u / 2 + 3 * u * u / 8 - u**4 / 16)
    out = np.where(y >= h, y, inner)
    return float(out) if out.ndim == 0 else out


def _jumps(est: IorEstimate):
    return est.lambda_tilde.jumps()


def smoothed_odds_rate(est: IorEstimate, kernel: KernelSpec, x):
    """Smoothed odds rate; ``+inf`` for ``x >= top - h``."""
    x = np.asarray(x, dtype=float)
    s, d = _jumps(est)
    vals = kernel_cdf(kernel, x[..., None] - s) @ d if s.size else np.zeros_like(x)
    out = np.where(x >= est.top - kernel.bandwidth, math.inf, vals)
    return float(out) if out.ndim == 0 else out


def smoothed_odds(est: IorEstimate, kernel: KernelSpec, x):
    """Integral of the smoothed odds rate from ``-inf`` to ``x``.

    Mass starts accumulating at ``s_1 - h``, left of the origin.
    """
    x = np.asarray(x, dtype=float)
    s, d = _jumps(est)
    vals = kernel_cdf_integral(kernel, x[..., None] - s) @ d if s.size else np.zeros_like(x)
    out = np.where(x > est.top - kernel.bandwidth, math.inf, vals)
    return float(out) if out.ndim == 0 else out


def smoothed_cdf(est: IorEstimate, kernel: KernelSpec, x):
    lam = np.asarray(smoothed_odds(est, kernel, x))
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(lam), 1.0, lam / (1.0 + lam))
    return float(out) if out.ndim == 0 else out


def smoothed_pdf(est: IorEstimate, kernel: KernelSpec, x):
    x = np.asarray(x, dtype=float)
    if np.any(x >= est.top - kernel.bandwidth):
        raise DomainError(
            "smoothed odds rate is infinite for x >= top - h; density undefined there"
        )
    out = smoothed_odds_rate(est, kernel, x) / (1.0 + smoothed_odds(est, kernel, x)) ** 2
    return float(out) if np.ndim(out) == 0 else out
