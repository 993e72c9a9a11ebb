"""Tests of the increasing-odds-rate hypothesis.

Two statistics are provided:

* ``KT`` measures how far the normalised empirical transform inverse is from
  its greatest convex minorant, evaluated at the knots ``i / n``.
* ``KS`` is the sup-distance between the empirical CDF and the constrained
  CDF estimate.

Both are scale free. Critical values come from Monte Carlo samples of the
log-logistic LL(1) reference, which is least favourable for ``KT``.
"""

from __future__ import annotations

import csv
import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import distributions, streams
from .estimator import _odds_knots, require_nondegenerate
from .functions import SortedSample
from .geometry import hull_indices
from .ttt import ttt_ordinates

__all__ = [
    "Method",
    "CalibrationCacheMiss",
    "TestReport",
    "NullDistribution",
    "CriticalValueTable",
    "kt_statistic",
    "ks_statistic",
    "statistic",
    "calibrate",
    "calibrate_many",
    "critical_value",
    "run_test",
]

DEFAULT_REPS = 10_000
DEFAULT_ALPHA = 0.1


class Method(str, enum.Enum):
    KT = "kt"
    KS = "ks"

    def __str__(self):
        return self.value


class CalibrationCacheMiss(LookupError):
    """A cached critical-value table does not cover the requested setting."""


def _as_sample(sample) -> SortedSample:
    return sample if isinstance(sample, SortedSample) else SortedSample.from_values(sample)


def _kt_values(values: np.ndarray) -> float:
    n = values.size
    T = ttt_ordinates(values)
    u = T / T[-1]
    u[-1] = 1.0
    level = np.arange(n + 1) / n
    # Tied observations give repeated abscissae; the minorant only sees the
    # lowest level at each one, the maximum below still scans every knot.
    keep = np.ones(n + 1, dtype=bool)
    keep[1:] = np.diff(u) > 0
    ux, ly = u[keep], level[keep]
    idx = hull_indices(ux.tolist(), ly.tolist(), False)
    minorant = np.interp(u, ux[idx], ly[idx])
    return float(max(0.0, np.max(level - minorant)))


def _ks_values(values: np.ndarray) -> float:
    n = values.size
    x, Lam, _, _ = _odds_knots(values)
    z, counts = np.unique(values, return_counts=True)
    ecdf = np.cumsum(counts) / n
    lam_z = np.interp(z, x, Lam)
    # Left limits of the constrained CDF at each distinct value (continuous
    # below the top, so equal to the value itself except at the top).
    ft = lam_z / (1.0 + lam_z)
    cands = [ft[0]]
    if z.size > 1:
        cands.append(np.max(np.abs(ecdf[:-1] - ft[:-1])))
        cands.append(np.max(np.abs(ecdf[:-1] - ft[1:])))
    return float(max(cands))


def kt_statistic(sample) -> float:
    """Max over ``i`` of ``i/n - g(u_i)`` with ``g`` the convex minorant of ``(u_i, i/n)``.

    ``u_i`` is the normalised transform inverse at ``i / n``. Zero exactly
    when the transform knots are concave.
    """
    sample = _as_sample(sample)
    require_nondegenerate(sample)
    return _kt_values(sample.values)


def ks_statistic(sample) -> float:
    """``sup_x |Fn(x) - F~n(x)|``, computed exactly from interval endpoints."""
    sample = _as_sample(sample)
    require_nondegenerate(sample)
    return _ks_values(sample.values)


_STATISTICS = {Method.KT: _kt_values, Method.KS: _ks_values}


def statistic(method, sample) -> float:
    method = Method(method)
    return kt_statistic(sample) if method is Method.KT else ks_statistic(sample)


def _order_index(alpha: float, reps: int) -> int:
    """1-based rank of the conservative critical value, ``ceil((1 - alpha)(M + 1))``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    # guard against 0.9 * 10001 = 9000.900000000001 style rounding
    return math.ceil((1 - alpha) * (reps + 1) - 1e-9)


def critical_value(null_stats: np.ndarray, alpha: float) -> float:
    """Conservative Monte Carlo critical value from sorted null statistics."""
    k = _order_index(alpha, null_stats.size)
    return math.inf if k > null_stats.size else float(null_stats[k - 1])


@dataclass(frozen=True)
class NullDistribution:
    """Sorted statistics of ``reps`` LL(1) samples of size ``n``."""

    method: Method
    n: int
    reps: int
    seed: int
    statistics: np.ndarray = field(repr=False)

    def critical_value(self, alpha: float) -> float:
        return critical_value(self.statistics, alpha)

    def p_value(self, observed: float) -> float:
        """Add-one Monte Carlo p-value ``(1 + #{T >= t}) / (M + 1)``."""
        exceed = self.statistics.size - int(np.searchsorted(self.statistics, observed, side="left"))
        return (1.0 + exceed) / (self.reps + 1.0)


def _null_chunk(methods: tuple[str, ...], n: int, seed: int, start: int, stop: int):
    fns = [_STATISTICS[Method(m)] for m in methods]
    out = np.empty((len(fns), stop - start))
    for r in range(start, stop):
        rng = streams.stream(seed, streams.CALIBRATION, n, r)
        values = distributions.quantile(distributions.REFERENCE, np.sort(rng.random(n)))
        for j, fn in enumerate(fns):
            out[j, r - start] = fn(values)
    return out


def _chunks(total: int, parts: int):
    step = max(1, math.ceil(total / parts))
    return [(lo, min(total, lo + step)) for lo in range(0, total, step)]


def calibrate_many(methods, n: int, reps: int = DEFAULT_REPS, seed: int = 0,
                   workers: int = 1) -> dict[Method, NullDistribution]:
    """Null distributions of several statistics computed on shared LL(1) samples.

    Replication ``r`` always uses the stream keyed by ``(seed, n, r)``, so the
    output is identical for any ``workers``.
    """
    methods = tuple(Method(m) for m in methods)
    if n < 2:
        raise ValueError("calibration needs n >= 2")
    if reps < 100:
        raise ValueError("calibration needs at least 100 replications")
    names = tuple(m.value for m in methods)
    if workers <= 1:
        stats = _null_chunk(names, n, seed, 0, reps)
    else:
        parts = _chunks(reps, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_null_chunk, names, n, seed, lo, hi) for lo, hi in parts]
            stats = np.concatenate([f.result() for f in futures], axis=1)
    return {
        m: NullDistribution(m, n, reps, seed, np.sort(stats[j]))
        for j, m in enumerate(methods)
    }


def calibrate(method, n: int, reps: int = DEFAULT_REPS, seed: int = 0,
              workers: int = 1) -> NullDistribution:
    return calibrate_many([method], n, reps, seed, workers)[Method(method)]


class CriticalValueTable:
    """Cached critical values, stored as CSV ``test,n,M,seed,alpha,critical_value``."""

    HEADER = ("test", "n", "M", "seed", "alpha", "critical_value")

    def __init__(self, rows=()):
        self.rows: list[tuple[Method, int, int, int, float, float]] = [
            (Method(t), int(n), int(m), int(s), float(a), float(c)) for t, n, m, s, a, c in rows
        ]

    @classmethod
    def from_null(cls, nulls, alphas) -> "CriticalValueTable":
        rows = []
        for null in nulls:
            for a in alphas:
                rows.append((null.method, null.n, null.reps, null.seed, a, null.critical_value(a)))
        return cls(rows)

    @classmethod
    def read(cls, path) -> "CriticalValueTable":
        with open(path, newline="") as fh:
            reader = csv.reader(row for row in fh if not row.startswith("#"))
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != cls.HEADER:
                raise CalibrationCacheMiss(f"{path}: not a critical-value table")
            return cls(reader)

    def write(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.HEADER)
            for t, n, m, s, a, c in self.rows:
                w.writerow([t.value, n, m, s, repr(a), repr(c)])

    def lookup(self, method, n: int, reps: int, seed: int, alpha: float) -> float:
        method = Method(method)
        for t, rn, rm, rs, ra, c in self.rows:
            if (t, rn, rm, rs) == (method, n, reps, seed) and math.isclose(ra, alpha, abs_tol=1e-12):
                return c
        raise CalibrationCacheMiss(
            f"no cached critical value for test={method.value} n={n} M={reps} "
            f"seed={seed} alpha={alpha}"
        )

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class TestReport:
    """Outcome of one test.

    ``p_value`` is ``None`` when the critical value came from a CSV table,
    which stores quantiles only.
    """

    __test__ = False  # keep pytest from collecting this class

    test: Method
    n: int
    statistic: float
    alpha: float
    critical_value: float
    p_value: float | None
    reject: bool
    reps: int
    seed: int
    source: str

    def summary(self) -> str:
        p = "n/a (cached table)" if self.p_value is None else f"{self.p_value:.6g}"
        verdict = "reject" if self.reject else "do not reject"
        return (
            f"{self.test.value.upper()} test of increasing odds rate (n={self.n})\n"
            f"  statistic      {self.statistic!r}\n"
            f"  critical value {self.critical_value!r} (alpha={self.alpha}, M={self.reps}, "
            f"seed={self.seed}, {self.source})\n"
            f"  p-value        {p}\n"
            f"  decision       {verdict} H0"
        )

    def machine_line(self) -> str:
        p = "" if self.p_value is None else repr(self.p_value)
        return f"{self.statistic!r},{self.critical_value!r},{p},{str(self.reject).lower()}"


def run_test(sample, method, alpha: float = DEFAULT_ALPHA, reps: int = DEFAULT_REPS,
             seed: int = 0, table=None, workers: int = 1) -> TestReport:
    """Compute the statistic and compare it with the LL(1) critical value.

    ``table`` may be a :class:`NullDistribution` or a
    :class:`CriticalValueTable`. It must match ``(method, n, reps, seed)``
    exactly; a mismatch raises :class:`CalibrationCacheMiss` rather than
    silently recalibrating.
    """
    method = Method(method)
    sample = _as_sample(sample)
    stat = statistic(method, sample)
    n = sample.n
    if table is None:
        null = calibrate(method, n, reps, seed, workers)
        source = "fresh"
    elif isinstance(table, NullDistribution):
        if (table.method, table.n, table.reps, table.seed) != (method, n, reps, seed):
            raise CalibrationCacheMiss(
                f"calibration is for test={table.method.value} n={table.n} M={table.reps} "
                f"seed={table.seed}, requested test={method.value} n={n} M={reps} seed={seed}"
            )
        null = table
        source = "cached"
    else:
        crit = table.lookup(method, n, reps, seed, alpha)
        return TestReport(method, n, stat, alpha, crit, None, stat >= crit, reps, seed,
                          "cached-table")
    crit = null.critical_value(alpha)
    return TestReport(method, n, stat, alpha, crit, null.p_value(stat), stat >= crit, reps,
                      seed, source)


def default_workers() -> int:
    return max(1, min(8, (os.cpu_count() or 1)))
