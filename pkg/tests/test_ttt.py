import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oddsrate import distributions as D
from oddsrate.functions import PiecewiseLinearFunction, SampleError, SortedSample
from oddsrate.ttt import empirical_cdf, invert_pl, normalize_ttt, ttt_inverse

from oracles import ttt_by_quadrature


def knots(f):
    return list(zip(f.x.tolist(), f.y.tolist()))


def test_empirical_cdf_examples():
    F = empirical_cdf(SortedSample([1.0, 3.0]))
    assert F([0.0, 0.99, 1.0, 2.0, 3.0, 10.0]).tolist() == [0, 0, 0.5, 0.5, 1, 1]
    F = empirical_cdf(SortedSample([5.0]))
    assert F(4.999) == 0.0 and F(5.0) == 1.0
    F = empirical_cdf(SortedSample([2.0, 2.0, 4.0]))
    assert F.breakpoints.tolist() == [2.0, 4.0]
    assert F(2.0) == pytest.approx(2 / 3) and F(3.9) == pytest.approx(2 / 3) and F(4.0) == 1.0


def test_ttt_examples():
    assert knots(ttt_inverse(SortedSample([1.0, 3.0]))) == [(0, 0), (0.5, 1.0), (1.0, 1.5)]
    assert knots(ttt_inverse(SortedSample([1.0, 10.0]))) == [(0, 0), (0.5, 1.0), (1.0, 3.25)]


def test_ttt_matches_quadrature_with_ties():
    values = [0.0, 0.5, 0.5, 2.0, 2.0, 2.0, 7.0]
    t = ttt_inverse(SortedSample(values))
    assert np.max(np.abs(t.y - ttt_by_quadrature(values))) <= 1e-12
    assert np.all(np.diff(t.y) >= 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1e3, allow_nan=False), min_size=1, max_size=40))
def test_ttt_quadrature_property(values):
    t = ttt_inverse(SortedSample.from_values(values))
    scale = max(1.0, max(values))
    assert np.max(np.abs(t.y - ttt_by_quadrature(values))) <= 1e-12 * scale


def test_ttt_strict_without_ties():
    s = D.sample(D.parse_spec("w:2"), 30, np.random.default_rng(2))
    assert not s.has_ties
    assert np.all(np.diff(ttt_inverse(s).y) > 0)


def test_normalize_examples():
    t = normalize_ttt(ttt_inverse(SortedSample([1.0, 3.0])))
    assert t.y.tolist() == pytest.approx([0, 2 / 3, 1], abs=1e-15)
    t = normalize_ttt(ttt_inverse(SortedSample([4.2])))
    assert knots(t) == [(0, 0), (1, 1)]
    ident = PiecewiseLinearFunction([0, 0.5, 1], [0, 0.5, 1])
    assert knots(normalize_ttt(ident)) == knots(ident)


def test_normalize_degenerate():
    with pytest.raises(SampleError):
        normalize_ttt(ttt_inverse(SortedSample([0.0, 0.0])))


def test_invert_examples():
    f = PiecewiseLinearFunction([0, 2 / 3, 1], [0, 0.5, 1])
    assert knots(invert_pl(f)) == [(0, 0), (0.5, 2 / 3), (1, 1)]
    ident = PiecewiseLinearFunction([0, 1], [0, 1])
    assert knots(invert_pl(ident)) == knots(ident)
    g = invert_pl(normalize_ttt(ttt_inverse(SortedSample([1.0, 10.0]))))
    assert g.x.tolist() == pytest.approx([0, 1 / 3.25, 1], abs=1e-15)
    assert g.y.tolist() == [0, 0.5, 1]


def test_invert_collapses_flat_runs():
    t = normalize_ttt(ttt_inverse(SortedSample([1.0, 2.0, 2.0, 2.0])))
    inv = invert_pl(t)
    assert np.all(np.diff(inv.x) > 0)
    assert inv.y.tolist() == [0.0, 0.25, 0.5]


def test_invert_twice_is_identity():
    s = D.sample(D.parse_spec("b2:2,3"), 25, np.random.default_rng(9))
    t = normalize_ttt(ttt_inverse(s))
    back = invert_pl(invert_pl(t))
    assert np.array_equal(back.x, t.x) and np.array_equal(back.y, t.y)


def test_reference_sample_transform_near_identity():
    # Uniform convergence to the identity for LL(1) samples of growing size.
    rng = np.random.default_rng(11)
    dists = []
    for n in (100, 1000, 10_000, 100_000):
        t = normalize_ttt(ttt_inverse(D.sample(D.REFERENCE, n, rng)))
        dists.append(np.max(np.abs(t.y - t.x)))
    assert dists[-1] < dists[0]
    assert dists[-1] < 0.05


def test_compensated_sum_large_n():
    rng = np.random.default_rng(3)
    values = np.sort(rng.random(1_000_000))
    y = ttt_inverse(SortedSample(values)).y
    n = values.size
    weights = ((n - np.arange(n)) / n) ** 2
    gaps = np.diff(values, prepend=0.0)
    import math
    assert y[-1] == pytest.approx(math.fsum(weights * gaps), rel=1e-15, abs=1e-15)
