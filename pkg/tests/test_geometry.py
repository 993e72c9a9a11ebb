import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oddsrate.functions import DomainError, PiecewiseLinearFunction
from oddsrate.geometry import gcm, hull_ordinates, hull_right_slopes, lcm

from oracles import hull_brute_force


def knots(f):
    return list(zip(f.x.tolist(), f.y.tolist()))


def test_lcm_examples():
    res = lcm(([0, 0.5, 1], [0, 1, 1.5]))
    assert knots(res.hull) == [(0, 0), (0.5, 1), (1, 1.5)]
    res = lcm(([0, 0.5, 1], [0, 1, 3.25]))
    assert knots(res.hull) == [(0, 0), (1, 3.25)]
    assert res.hull(0.5) == pytest.approx(1.625)
    assert res.support_indices.tolist() == [0, 2]
    assert knots(lcm(([0, 1], [0, 1])).hull) == [(0, 0), (1, 1)]


def test_gcm_examples():
    assert knots(gcm(([0, 0.3077, 1], [0, 0.5, 1])).hull) == [(0, 0), (1, 1)]
    res = gcm(([0, 2 / 3, 1], [0, 0.5, 1]))
    assert len(res.hull) == 3
    assert res.hull.slopes.tolist() == pytest.approx([0.75, 1.5])
    assert knots(gcm(([0, 1], [2, 5])).hull) == [(0, 2), (1, 5)]


def test_hull_errors():
    with pytest.raises(ValueError):
        lcm(([0.0], [1.0]))
    with pytest.raises(ValueError):
        gcm(([0.0, 0.0, 1.0], [0.0, 1.0, 2.0]))


def test_collinear_knots_off_support():
    res = lcm(([0, 1, 2, 3], [0, 1, 2, 3]))
    assert res.support_indices.tolist() == [0, 3]
    assert res.hull(1.5) == 1.5


def test_slopes():
    hull = lcm(([0, 0.5, 1], [0, 1, 1.5])).hull
    assert hull.right_slope(0.0) == pytest.approx(2.0)
    assert hull.right_slope(0.5) == pytest.approx(1.0)
    assert hull.left_slope(0.5) == pytest.approx(2.0)
    line = PiecewiseLinearFunction([0, 0.3, 1], [1, 1.6, 3])
    for t in (0.0, 0.3, 0.7):
        assert line.right_slope(t) == pytest.approx(2.0)
    for t in (0.3, 0.7, 1.0):
        assert line.left_slope(t) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        hull.right_slope(1.0)
    with pytest.raises(DomainError):
        hull.left_slope(0.0)


knot_sets = st.integers(2, 25).flatmap(
    lambda m: st.tuples(
        st.lists(st.floats(0.01, 1.0), min_size=m - 1, max_size=m - 1),
        st.lists(st.floats(-10, 10), min_size=m, max_size=m),
    )
)


def _xy(data):
    steps, y = data
    x = np.concatenate(([0.0], np.cumsum(steps)))
    return x, np.asarray(y)


@settings(max_examples=200, deadline=None)
@given(knot_sets)
def test_hulls_match_brute_force(data):
    x, y = _xy(data)
    for upper, fn in ((True, lcm), (False, gcm)):
        res = fn((x, y))
        vals = res.hull(x)
        ref = hull_brute_force(x, y, upper)
        assert np.allclose(vals, ref, atol=1e-9 * (1 + np.abs(ref).max()))
        if upper:
            assert np.all(vals >= y - 1e-12)
            assert np.all(np.diff(res.hull.slopes) < 0)
        else:
            assert np.all(vals <= y + 1e-12)
            assert np.all(np.diff(res.hull.slopes) > 0)
        assert res.hull.x[0] == x[0] and res.hull.x[-1] == x[-1]
        assert np.allclose(hull_ordinates(x, y, upper), vals)


@settings(max_examples=200, deadline=None)
@given(knot_sets)
def test_reflection_duality(data):
    x, y = _xy(data)
    assert np.allclose(gcm((x, y)).hull(x), -lcm((x, -y)).hull(x))


@settings(max_examples=100, deadline=None)
@given(knot_sets)
def test_idempotence(data):
    x, y = _xy(data)
    once = lcm((x, y)).hull
    twice = lcm(once).hull
    assert np.allclose(twice(x), once(x))
    low = gcm((x, y)).hull
    assert np.allclose(gcm(low).hull(x), low(x))


def test_hull_right_slopes_match_object():
    x = np.linspace(0, 1, 9)
    y = np.sqrt(x) + 0.05 * np.sin(17 * x)
    hull = lcm((x, y)).hull
    fast = hull_right_slopes(x, y, True)
    assert np.allclose(fast, [hull.right_slope(t) for t in x[:-1]])
