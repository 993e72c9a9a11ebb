"""Monte Carlo studies: standardised MSE of the constrained CDF and test power.

Each replication draws from its own stream keyed by
``(seed, study, family label, n, replication)``; cells are independent of the
rest of the grid, and output does not depend on the number of workers.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import __version__, distributions, streams
from .distributions import DistributionSpec, parse_spec
from .estimator import _odds_knots
from .testing import (
    Method,
    CriticalValueTable,
    NullDistribution,
    _STATISTICS,
    calibrate_many,
)

__all__ = [
    "StudyConfig",
    "MseRow",
    "PowerRow",
    "mse_study",
    "power_study",
    "write_table",
    "default_mse_config",
    "default_power_config",
    "PERCENTILES",
]

PERCENTILES = tuple(round(k / 100, 2) for k in range(1, 100))

MSE_FAMILIES = ("ll:1", "ll:2", "w:2", "b2:2,3", "hs:0.6")
MSE_SIZES = (10, 30, 50, 100)

POWER_FAMILIES = (
    "ll:0.7", "ll:0.8", "ll:0.9", "ll:1", "ll:1.1", "ll:1.2",
    "w:0.3", "w:0.4", "w:0.5", "w:0.6", "w:0.7", "w:0.8",
    "b2:0.3,2", "b2:0.4,2", "b2:0.5,2", "b2:0.6,2", "b2:0.7,2",
    "bs:2", "bs:2.5", "bs:3", "bs:3.5", "bs:4",
    "pw:5,1",
)
POWER_SIZES = (50, 100, 200)


@dataclass(frozen=True)
class StudyConfig:
    study: str
    families: tuple[DistributionSpec, ...]
    sample_sizes: tuple[int, ...]
    replications: int
    seed: int = 0
    alpha: float = 0.1
    percentiles: tuple[float, ...] = PERCENTILES
    calibration_reps: int = 10_000
    methods: tuple[Method, ...] = (Method.KS, Method.KT)
    workers: int = field(default=1, compare=False)

    def __post_init__(self):
        if self.study not in ("mse", "power"):
            raise ValueError("study must be 'mse' or 'power'")
        fams = tuple(parse_spec(f) if isinstance(f, str) else f for f in self.families)
        object.__setattr__(self, "families", fams)
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "percentiles", tuple(float(p) for p in self.percentiles))
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not fams or not self.sample_sizes:
            raise ValueError("need at least one family and one sample size")
        if any(n < 2 for n in self.sample_sizes):
            raise ValueError("sample sizes must be >= 2")
        if not all(0 < p < 1 for p in self.percentiles):
            raise ValueError("percentiles must lie strictly inside (0, 1)")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.study == "mse":
            bad = [str(f) for f in fams if not distributions.is_ior(f)]
            if bad:
                raise ValueError(f"MSE study needs IOR families; got {', '.join(bad)}")

    def resolved(self) -> dict[str, str]:
        """Canonical key/value description, also the input of :meth:`digest`."""
        out = {
            "study": self.study,
            "families": " ".join(str(f) for f in self.families),
            "sizes": ",".join(str(n) for n in self.sample_sizes),
            "reps": str(self.replications),
            "seed": str(self.seed),
        }
        if self.study == "mse":
            out["percentiles"] = ",".join(repr(p) for p in self.percentiles)
        else:
            out["alpha"] = repr(self.alpha)
            out["calib_reps"] = str(self.calibration_reps)
            out["methods"] = ",".join(m.value for m in self.methods)
        return out

    def digest(self) -> str:
        text = "\n".join(f"{k}={v}" for k, v in self.resolved().items())
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    @classmethod
    def from_mapping(cls, study: str, mapping: dict[str, str], **defaults) -> "StudyConfig":
        """Build from flat ``key=value`` strings (config file or CLI flags)."""
        base = default_mse_config() if study == "mse" else default_power_config()
        kw = {}
        for key, raw in {**defaults, **mapping}.items():
            if raw is None:
                continue
            raw = str(raw)
            if key == "families":
                kw["families"] = tuple(tok for tok in raw.replace(";", " ").split() if tok)
            elif key == "sizes":
                kw["sample_sizes"] = tuple(int(t) for t in raw.split(","))
            elif key == "reps":
                kw["replications"] = int(raw)
            elif key == "seed":
                kw["seed"] = int(raw)
            elif key == "alpha":
                kw["alpha"] = float(raw)
            elif key == "percentiles":
                kw["percentiles"] = tuple(float(t) for t in raw.split(","))
            elif key == "calib_reps":
                kw["calibration_reps"] = int(raw)
            elif key == "methods":
                kw["methods"] = tuple(t.strip() for t in raw.split(","))
            elif key == "workers":
                kw["workers"] = int(raw)
            else:
                raise ValueError(f"unknown config key {key!r}")
        return replace(base, **kw)


def default_mse_config() -> StudyConfig:
    return StudyConfig("mse", MSE_FAMILIES, MSE_SIZES, replications=1000)


def default_power_config() -> StudyConfig:
    return StudyConfig("power", POWER_FAMILIES, POWER_SIZES, replications=500)


class MseRow(NamedTuple):
    family: str
    n: int
    percentile: float
    mse_constrained: float
    mse_empirical: float
    ratio: float


class PowerRow(NamedTuple):
    family: str
    shape: str
    n: int
    test: str
    rejection_rate: float


def _run(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *t) for t in tasks]
        return [f.result() for f in futures]


def _split(reps: int, workers: int):
    if workers <= 1:
        return [(0, reps)]
    step = max(1, math.ceil(reps / (workers * 2)))
    return [(lo, min(reps, lo + step)) for lo in range(0, reps, step)]


def _cell_stream(seed, study, spec_label, n, r):
    return streams.stream(seed, study, streams.label_key(spec_label), n, r)


def _mse_chunk(spec_label, n, seed, lo, hi, points, truth):
    spec = parse_spec(spec_label)
    out = np.empty((hi - lo, len(points)))
    for r in range(lo, hi):
        values = distributions.sample(spec, n, _cell_stream(seed, streams.MSE_STUDY, spec_label, n, r)).values
        if values[-1] == 0:
            est = np.where(points >= 0, 1.0, 0.0)
        else:
            x, Lam, _, _ = _odds_knots(values)
            lam = np.interp(np.minimum(points, values[-1]), x, Lam)
            est = np.where(points >= values[-1], 1.0, lam / (1.0 + lam))
        out[r - lo] = (est - truth) ** 2
    return out


def mse_study(config: StudyConfig) -> list[MseRow]:
    """Mean squared error of the constrained CDF at true percentiles.

    The empirical-CDF baseline is the exact ``p (1 - p) / n``.
    """
    p = np.asarray(config.percentiles)
    tasks, cells = [], []
    for spec in config.families:
        label = str(spec)
        points = np.asarray(distributions.quantile(spec, p))
        for n in config.sample_sizes:
            chunks = _split(config.replications, config.workers)
            cells.append((label, n, len(chunks)))
            tasks += [(label, n, config.seed, lo, hi, points, p) for lo, hi in chunks]
    results = iter(_run(_mse_chunk, tasks, config.workers))
    rows = []
    for label, n, k in cells:
        sq = np.concatenate([next(results) for _ in range(k)], axis=0)
        mse = sq.sum(axis=0) / config.replications
        base = p * (1 - p) / n
        for j, pj in enumerate(p):
            rows.append(MseRow(label, n, float(pj), float(mse[j]), float(base[j]),
                               float(mse[j] / base[j])))
    return rows


def _power_chunk(spec_label, n, seed, lo, hi, methods):
    spec = parse_spec(spec_label)
    fns = [_STATISTICS[Method(m)] for m in methods]
    out = np.empty((len(fns), hi - lo))
    for r in range(lo, hi):
        values = distributions.sample(spec, n, _cell_stream(seed, streams.POWER_STUDY, spec_label, n, r)).values
        if values[0] == values[-1]:
            out[:, r - lo] = 0.0
            continue
        for j, fn in enumerate(fns):
            out[j, r - lo] = fn(values)
    return out


def _critical_values(config: StudyConfig, calibrations):
    crit = {}
    for n in config.sample_sizes:
        missing = []
        for m in config.methods:
            if isinstance(calibrations, CriticalValueTable):
                crit[m, n] = calibrations.lookup(m, n, config.calibration_reps, config.seed,
                                                 config.alpha)
            elif calibrations and (m, n) in calibrations:
                null: NullDistribution = calibrations[m, n]
                if (null.reps, null.seed) != (config.calibration_reps, config.seed):
                    raise ValueError(f"supplied calibration for {m.value}, n={n} does not match config")
                crit[m, n] = null.critical_value(config.alpha)
            else:
                missing.append(m)
        if missing:
            nulls = calibrate_many(missing, n, config.calibration_reps, config.seed, config.workers)
            for m, null in nulls.items():
                crit[m, n] = null.critical_value(config.alpha)
    return crit


def power_study(config: StudyConfig, calibrations=None) -> list[PowerRow]:
    """Rejection rates of each test at level ``alpha``.

    ``calibrations`` may be a :class:`CriticalValueTable` or a dict mapping
    ``(Method, n)`` to :class:`NullDistribution`; missing entries are
    calibrated with ``config.seed`` and ``config.calibration_reps``.
    """
    crit = _critical_values(config, calibrations)
    methods = tuple(m.value for m in config.methods)
    tasks, cells = [], []
    for spec in config.families:
        label = str(spec)
        for n in config.sample_sizes:
            chunks = _split(config.replications, config.workers)
            cells.append((spec, n, len(chunks)))
            tasks += [(label, n, config.seed, lo, hi, methods) for lo, hi in chunks]
    results = iter(_run(_power_chunk, tasks, config.workers))
    rows = []
    for spec, n, k in cells:
        stats = np.concatenate([next(results) for _ in range(k)], axis=1)
        shape = str(spec).partition(":")[2]
        for j, m in enumerate(config.methods):
            rate = float(np.mean(stats[j] >= crit[m, n]))
            rows.append(PowerRow(spec.family.value, shape, n, m.value, rate))
    return rows


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_table(rows, config: StudyConfig, out=None) -> str:
    """Render ``rows`` as CSV with a leading manifest comment; optionally write it."""
    header = MseRow._fields if config.study == "mse" else PowerRow._fields
    buf = io.StringIO()
    buf.write(f"# config={config.digest()} seed={config.seed} version={__version__}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text
