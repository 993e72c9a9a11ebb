import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oddsrate import distributions as D
from oddsrate.estimator import fit_ior
from oddsrate.functions import SampleError, SortedSample
from oddsrate.geometry import gcm
from oddsrate.harness import StudyConfig, power_study
from oddsrate.testing import (
    CalibrationCacheMiss,
    CriticalValueTable,
    Method,
    calibrate,
    calibrate_many,
    critical_value,
    ks_statistic,
    kt_statistic,
    run_test,
    statistic,
)
from oddsrate.ttt import empirical_cdf, invert_pl, normalize_ttt, ttt_inverse

MIXED = ["ll:1", "ll:0.7", "w:0.5", "w:2", "b2:2,3", "hs:0.6", "bs:3", "pw:5,1"]


def kt_dense(sample):
    t = normalize_ttt(ttt_inverse(sample))
    tbar = invert_pl(t)
    minor = gcm(tbar).hull
    # Ties make the inverse jump vertically; the sup covers the top of each jump.
    ux, last = np.unique(t.y[::-1], return_index=True)
    upper = np.interp(np.linspace(0, 1, 20_001), ux, t.x[::-1][last])
    u = np.linspace(0, 1, 20_001)
    dense = max(np.max(tbar(u) - minor(u)), np.max(upper - minor(u)))
    at_knots = np.max(t.x - minor(t.y))
    return float(max(dense, at_knots))


def ks_dense(sample):
    est = fit_ior(sample)
    Fn = empirical_cdf(sample)
    v = sample.values
    eps = 1e-11 * max(1.0, v[-1])
    x = np.concatenate((np.linspace(0, v[-1] * 1.01, 20_001), v, v - eps))
    x = x[x >= 0]
    return float(np.max(np.abs(Fn(x) - est.cdf(x))))


def test_hand_examples():
    assert kt_statistic([1.0, 3.0]) == 0.0
    assert kt_statistic([1.0, 10.0]) == pytest.approx(0.5 - 1 / 3.25, abs=1e-12)
    assert kt_statistic([1.0, 10.0]) == pytest.approx(0.1923076923, abs=1e-10)
    assert ks_statistic([1.0, 3.0]) == pytest.approx(1 / 3, abs=1e-12)
    assert statistic("ks", [1.0, 3.0]) == ks_statistic([1.0, 3.0])


def test_degenerate_samples_rejected():
    for bad in ([2.0, 2.0, 2.0], [5.0], [0.0, 0.0]):
        for fn in (kt_statistic, ks_statistic):
            with pytest.raises(SampleError):
                fn(bad)


@pytest.mark.parametrize("spec", MIXED)
def test_statistics_match_dense_grid(spec):
    rng = np.random.default_rng(17)
    for n in (5, 20, 60):
        s = D.sample(D.parse_spec(spec), n, rng)
        assert kt_statistic(s) == pytest.approx(kt_dense(s), abs=1e-12)
        assert ks_statistic(s) == pytest.approx(ks_dense(s), abs=1e-9)


def test_statistics_with_ties():
    s = SortedSample([0.5, 1.0, 1.0, 1.0, 2.0, 2.0, 7.0])
    assert kt_statistic(s) == pytest.approx(kt_dense(s), abs=1e-12)
    assert ks_statistic(s) == pytest.approx(ks_dense(s), abs=1e-9)


def test_ks_positive_when_kt_zero():
    # Concave transform knots: KT vanishes, KS generally does not.
    n = 12
    c = np.linspace(2.0, 0.5, n)
    k = np.arange(1, n + 1)
    s = SortedSample(np.cumsum(c / (n - k + 1) ** 2))
    assert kt_statistic(s) == 0.0
    assert ks_statistic(s) > 0.0


sample_lists = st.lists(st.floats(1e-3, 100.0), min_size=2, max_size=30).filter(
    lambda v: min(v) != max(v)
)


@settings(max_examples=100, deadline=None)
@given(sample_lists, st.sampled_from([0.125, 0.5, 2.0, 8.0, 1024.0]))
def test_bounds_and_scale_invariance(values, c):
    s = SortedSample.from_values(values)
    kt, ks = kt_statistic(s), ks_statistic(s)
    assert 0.0 <= kt <= 1.0 and 0.0 <= ks <= 1.0
    # powers of two keep the rescaling exact
    assert kt_statistic(s.scaled(c)) == kt
    assert ks_statistic(s.scaled(c)) == ks


@settings(max_examples=30, deadline=None)
@given(sample_lists, st.floats(0.01, 100.0))
def test_scale_invariance_arbitrary_factor(values, c):
    s = SortedSample.from_values(values)
    assert kt_statistic(s.scaled(c)) == pytest.approx(kt_statistic(s), abs=1e-12)
    assert ks_statistic(s.scaled(c)) == pytest.approx(ks_statistic(s), abs=1e-12)


def test_critical_value_convention():
    stats = np.arange(1.0, 100.0)  # M = 99
    assert critical_value(stats, 0.1) == 90.0
    assert critical_value(stats, 0.5) == 50.0
    assert critical_value(stats, 0.001) == math.inf
    with pytest.raises(ValueError):
        critical_value(stats, 1.0)


def test_critical_values_nonincreasing_in_alpha(calibrations):
    null = calibrations.get("kt", 50)
    crit = [null.critical_value(a) for a in (0.01, 0.05, 0.1, 0.2, 0.5)]
    assert all(a >= b for a, b in zip(crit, crit[1:]))


def test_p_value_add_one(calibrations):
    null = calibrations.get("ks", 50)
    assert null.p_value(np.inf) == 1 / (null.reps + 1)
    assert null.p_value(0.0) == 1.0
    assert all(null.p_value(t) >= 1 / (null.reps + 1) for t in null.statistics[::500])
    assert type(null.p_value(0.3)) is float


def test_calibration_deterministic_across_workers():
    a = calibrate_many(["kt", "ks"], 30, reps=400, seed=3, workers=1)
    b = calibrate_many(["kt", "ks"], 30, reps=400, seed=3, workers=3)
    for m in Method:
        assert np.array_equal(a[m].statistics, b[m].statistics)
    single = calibrate("kt", 30, reps=400, seed=3)
    assert np.array_equal(single.statistics, a[Method.KT].statistics)


def test_calibration_argument_checks():
    with pytest.raises(ValueError):
        calibrate("kt", 1, reps=200)
    with pytest.raises(ValueError):
        calibrate("kt", 10, reps=50)


def test_run_test_hand_example():
    rep = run_test([1.0, 3.0], "kt", alpha=0.1, reps=200)
    assert rep.statistic == 0.0 and not rep.reject
    assert rep.p_value == 1.0
    assert rep.source == "fresh"
    assert rep.machine_line().endswith(",false")


def test_run_test_uses_cached_null(calibrations):
    null = calibrations.get("kt", 50)
    s = D.sample(D.parse_spec("pw:5,1"), 50, np.random.default_rng(2))
    rep = run_test(s, "kt", reps=10_000, table=null)
    assert rep.source == "cached"
    assert rep.reject == (rep.statistic >= rep.critical_value)
    with pytest.raises(CalibrationCacheMiss):
        run_test(s, "kt", reps=5_000, table=null)
    with pytest.raises(CalibrationCacheMiss):
        run_test(s, "ks", reps=10_000, table=null)


def test_table_roundtrip_and_miss(tmp_path, calibrations):
    nulls = [calibrations.get(m, 50) for m in ("kt", "ks")]
    table = CriticalValueTable.from_null(nulls, [0.05, 0.1])
    path = tmp_path / "crit.csv"
    table.write(path)
    back = CriticalValueTable.read(path)
    assert back.rows == table.rows
    assert back.lookup("kt", 50, 10_000, 0, 0.1) == nulls[0].critical_value(0.1)
    assert back.lookup("ks", 50, 10_000, 0, 0.05) >= back.lookup("ks", 50, 10_000, 0, 0.1)
    for args in (("kt", 51, 10_000, 0, 0.1), ("kt", 50, 9_999, 0, 0.1),
                 ("kt", 50, 10_000, 1, 0.1), ("kt", 50, 10_000, 0, 0.2)):
        with pytest.raises(CalibrationCacheMiss):
            back.lookup(*args)
    s = D.sample(D.REFERENCE, 50, np.random.default_rng(0))
    rep = run_test(s, "ks", alpha=0.1, reps=10_000, table=back)
    assert rep.p_value is None and rep.source == "cached-table"


def test_table_read_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(CalibrationCacheMiss):
        CriticalValueTable.read(path)


def test_kt_critical_value_shrinks_with_n(calibrations):
    crit = [calibrations.get("kt", n).critical_value(0.1) for n in (50, 100, 200)]
    assert crit[0] > crit[1] > crit[2]


def _rejection_rates(spec, n, calibrations, trials=500, seed=0):
    config = StudyConfig("power", (spec,), (n,), replications=trials, seed=seed,
                         calibration_reps=10_000, workers=4)
    nulls = {(m, n): calibrations.get(m, n) for m in Method}
    return {r.test: r.rejection_rate for r in power_study(config, nulls)}


def test_size_control_under_reference(calibrations):
    rates = _rejection_rates("ll:1", 100, calibrations)
    assert rates["kt"] <= 0.1 + 3 * math.sqrt(0.09 / 500)


def test_unbiased_under_dor(calibrations):
    rates = _rejection_rates("ll:0.7", 100, calibrations)
    assert rates["kt"] >= 0.1 - 3 * math.sqrt(0.09 / 500)


def test_power_against_piecewise_odds(calibrations):
    rates = _rejection_rates("pw:5,1", 100, calibrations)
    assert rates["ks"] > 0.5
    assert rates["kt"] > 0.1 + 3 * math.sqrt(0.09 / 500)
