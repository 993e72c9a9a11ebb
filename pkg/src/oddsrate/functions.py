"""Immutable function containers shared by the estimators and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SampleError",
    "DomainError",
    "SortedSample",
    "PiecewiseLinearFunction",
    "StepFunction",
]


class SampleError(ValueError):
    """Raised for empty, negative, non-finite or degenerate samples."""


class DomainError(ValueError):
    """Raised when a function is evaluated outside its domain."""


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


class SortedSample:
    """Ascending, nonnegative observations ``X(1) <= ... <= X(n)``.

    Construct with :meth:`from_values` to sort arbitrary input; the plain
    constructor expects already sorted data and only validates it.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        arr = _readonly(values).ravel()
        if arr.size == 0:
            raise SampleError("sample is empty")
        if not np.all(np.isfinite(arr)):
            raise SampleError("sample contains non-finite values")
        if arr[0] < 0:
            raise SampleError("observations must be nonnegative")
        if np.any(np.diff(arr) < 0):
            raise SampleError("observations are not sorted; use SortedSample.from_values")
        self.values = arr

    @classmethod
    def from_values(cls, values) -> "SortedSample":
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size and np.any(arr < 0):
            raise SampleError("observations must be nonnegative")
        return cls(np.sort(arr))

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def has_ties(self) -> bool:
        return bool(np.any(np.diff(self.values) == 0))

    @property
    def top(self) -> float:
        return float(self.values[-1])

    def scaled(self, c: float) -> "SortedSample":
        if not c > 0:
            raise ValueError("scale factor must be positive")
        return SortedSample(self.values * c)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"SortedSample(n={self.n}, top={self.top!r})"


@dataclass(frozen=True)
class PiecewiseLinearFunction:
    """Linear interpolation between knots with strictly increasing abscissae.

    Only defined on ``[x[0], x[-1]]``; evaluation outside raises
    :class:`DomainError`.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _readonly(self.x)
        y = _readonly(self.y)
        if x.ndim != 1 or x.shape != y.shape or x.size < 1:
            raise ValueError("knot arrays must be one-dimensional and of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("knot abscissae must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.y) / np.diff(self.x)

    def __len__(self):
        return int(self.x.size)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.domain
        if np.any(t_arr < lo) or np.any(t_arr > hi) or np.any(np.isnan(t_arr)):
            raise DomainError(f"evaluation outside [{lo}, {hi}]")
        # np.interp returns the ordinate exactly at a knot.
        out = np.interp(t_arr, self.x, self.y)
        return float(out) if t_arr.ndim == 0 else out

    def right_slope(self, t: float) -> float:
        """Slope of the segment starting at or straddling ``t``."""
        lo, hi = self.domain
        if not lo <= t < hi:
            raise DomainError(f"right slope needs t in [{lo}, {hi})")
        i = int(np.searchsorted(self.x, t, side="right")) - 1
        return float(self.slopes[i])

    def left_slope(self, t: float) -> float:
        """Slope of the segment ending at or straddling ``t``."""
        lo, hi = self.domain
        if not lo < t <= hi:
            raise DomainError(f"left slope needs t in ({lo}, {hi}]")
        i = int(np.searchsorted(self.x, t, side="left")) - 1
        return float(self.slopes[i])

    def scale_y(self, c: float) -> "PiecewiseLinearFunction":
        return PiecewiseLinearFunction(self.x, self.y * c)


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function.

    ``values[i]`` holds on ``[breakpoints[i], breakpoints[i + 1])``; ``before``
    holds left of the first breakpoint. When ``infinite_from`` is set, the
    function is ``+inf`` on ``[infinite_from, inf)``.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    before: float = 0.0
    infinite_from: float | None = None

    def __post_init__(self):
        b = _readonly(self.breakpoints)
        v = _readonly(self.values)
        if b.shape != v.shape or b.ndim != 1:
            raise ValueError("breakpoints and values must be matching 1-d arrays")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if self.infinite_from is not None and b.size and self.infinite_from <= b[-1]:
            raise ValueError("infinite tail must start after the last breakpoint")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t_arr, side="right") - 1
        padded = np.concatenate(([self.before], self.values))
        out = padded[idx + 1]
        if self.infinite_from is not None:
            out = np.where(t_arr >= self.infinite_from, math.inf, out)
        return float(out) if t_arr.ndim == 0 else out

    def jumps(self) -> tuple[np.ndarray, np.ndarray]:
        """Locations and sizes of the finite jumps (zero-size jumps dropped)."""
        prev = np.concatenate(([self.before], self.values[:-1]))
        sizes = self.values - prev
        keep = sizes != 0
        return self.breakpoints[keep], sizes[keep]
