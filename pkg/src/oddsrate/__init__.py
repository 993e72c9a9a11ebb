"""Nonparametric inference for lifetime distributions with increasing odds rate."""

__version__ = "0.1.0"

from .distributions import DistributionSpec, parse_spec
from .estimator import IorEstimate, fit_ior
from .functions import PiecewiseLinearFunction, SortedSample, StepFunction
from .smoothing import KernelSpec
from .testing import (
    CriticalValueTable,
    Method,
    TestReport,
    calibrate,
    ks_statistic,
    kt_statistic,
    run_test,
)
from .ttt import empirical_cdf, ttt_inverse

__all__ = [
    "DistributionSpec",
    "parse_spec",
    "IorEstimate",
    "fit_ior",
    "PiecewiseLinearFunction",
    "SortedSample",
    "StepFunction",
    "KernelSpec",
    "CriticalValueTable",
    "Method",
    "TestReport",
    "calibrate",
    "ks_statistic",
    "kt_statistic",
    "run_test",
    "empirical_cdf",
    "ttt_inverse",
]
