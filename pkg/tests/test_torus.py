import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torus_transfer.torus import (
    combined_field,
    combined_second_derivative,
    field_derivative,
    field_value,
    wrap,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


@pytest.mark.parametrize("a, expected", [(0.0, 0.0), (2 * math.pi, 0.0), (-math.pi / 2, 1.5 * math.pi)])
def test_wrap_examples(a, expected):
    assert wrap(a) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_wrap_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        wrap(bad)


@given(finite)
def test_wrap_range_and_period(a):
    w = wrap(a)
    assert 0.0 <= w < 2 * math.pi
    d = abs(wrap(a + 2 * math.pi) - w)
    assert min(d, 2 * math.pi - d) < 1e-9  # circular distance; a + 2*pi is itself rounded


def test_wrap_tiny_negative_stays_below_two_pi():
    assert wrap(-1e-300) < 2 * math.pi
    assert wrap(np.array([-1e-300, 7.0])).shape == (2,)


@pytest.mark.parametrize("i, x, expected", [(1, math.pi / 2, 1.0), (2, math.pi / 4, 1.0), (0, 0.37, 1.0), (0, 5.0, 1.0)])
def test_field_value_examples(i, x, expected):
    assert field_value(i, x) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("i, x, expected", [(0, 1.3, 0.0), (1, 0.0, 1.0), (2, 0.0, 2.0)])
def test_field_derivative_examples(i, x, expected):
    assert field_derivative(i, x) == pytest.approx(expected, abs=1e-15)


def test_field_index_checked():
    with pytest.raises(ValueError):
        field_value(3, 0.0)


@pytest.mark.parametrize("x, w, expected", [
    (0.8, (1, 0, 0), (1.0, 0.0)),
    (math.pi / 2, (0, 1, 0), (1.0, 0.0)),
    (math.pi / 4, (0, 0, 2), (2.0, 0.0)),
])
def test_combined_field_examples(x, w, expected):
    v, d = combined_field(x, w)
    assert v == pytest.approx(expected[0], abs=1e-15)
    assert d == pytest.approx(expected[1], abs=1e-15)


def test_fields_periodic(rng):
    x = rng.uniform(0, 2 * math.pi, 100)
    for i in range(3):
        assert np.allclose(field_value(i, wrap(x + 2 * math.pi)), field_value(i, x), atol=1e-14)
        assert np.allclose(field_derivative(i, wrap(x + 2 * math.pi)), field_derivative(i, x), atol=1e-14)


def test_derivative_matches_central_differences(rng):
    x = rng.uniform(0, 2 * math.pi, 100)
    step = 1e-5
    for i in (1, 2):
        fd = (field_value(i, x + step) - field_value(i, x - step)) / (2 * step)
        exact = field_derivative(i, x)
        rel = np.abs(fd - exact) / np.maximum(np.abs(exact), 1e-3)
        assert rel.max() < 1e-8


def test_second_derivative_matches_differences(rng):
    x = rng.uniform(0, 2 * math.pi, 50)
    w = np.array([0.3, -1.2, 0.7])
    step = 1e-5
    fd = (combined_field(x + step, w)[1] - combined_field(x - step, w)[1]) / (2 * step)
    assert np.allclose(fd, combined_second_derivative(x, w), atol=1e-8)


def test_combined_field_linear_in_weights(rng):
    x = rng.uniform(0, 2 * math.pi, 50)
    w, v = rng.normal(size=3), rng.normal(size=3)
    a, b = 0.7, -2.1
    lhs = combined_field(x, a * w + b * v)
    rw, rv = combined_field(x, w), combined_field(x, v)
    for k in range(2):
        assert np.allclose(lhs[k], a * rw[k] + b * rv[k], rtol=0, atol=1e-14)
