import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.integrate import quad

from lshull.grid import (delta_smooth, div_backward, grad_forward, heaviside_smooth,
                         inner_product, laplacian_central, magnitude)

floats = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
fields = st.tuples(st.integers(2, 9), st.integers(2, 9)).flatmap(
    lambda s: arrays(np.float64, s, elements=floats))


def test_gradient_of_ramp():
    f = np.add.outer(np.arange(4.0), np.zeros(5))
    g = grad_forward(f)
    # forward difference wraps at the last row: 0 - 3
    assert np.array_equal(g[0, :3], np.ones((3, 5)))
    assert np.array_equal(g[0, 3], np.full(5, -3.0))
    assert not g[1].any()


def test_divergence_wraps_at_first_index():
    q = np.zeros((2, 3, 4))
    q[1, 1, 3] = 1.0
    d = div_backward(q)
    # q2(m,1) - q2(m,N) at the first column
    assert d[1, 0] == -1.0 and d[1, 3] == 1.0
    assert np.count_nonzero(d) == 2


def test_laplacian_of_delta_is_five_point_stencil():
    f = np.zeros((5, 5))
    f[2, 2] = 1.0
    lap = laplacian_central(f)
    assert lap[2, 2] == -4.0
    assert lap[1, 2] == lap[3, 2] == lap[2, 1] == lap[2, 3] == 1.0
    assert lap.sum() == 0.0


@pytest.mark.parametrize("shape", [(8, 8), (16, 12), (32, 32)])
def test_adjointness_and_composition(shape):
    rng = np.random.default_rng(sum(shape))
    for _ in range(100):
        f = rng.normal(size=shape)
        q = rng.normal(size=(2,) + shape)
        g = grad_forward(f)
        lhs = inner_product(g, q)
        rhs = -inner_product(f, div_backward(q))
        assert abs(lhs - rhs) <= 1e-12 * np.linalg.norm(g) * np.linalg.norm(q)
        lap = laplacian_central(f)
        assert np.max(np.abs(div_backward(grad_forward(f)) - lap)) <= 1e-12 * np.max(np.abs(lap))


@settings(max_examples=60, deadline=None)
@given(fields, st.integers(-5, 5), st.integers(-5, 5))
def test_operators_commute_with_cyclic_shift(f, a, b):
    shift = lambda g: np.roll(g, (a, b), axis=(-2, -1))
    np.testing.assert_array_equal(grad_forward(shift(f)), shift(grad_forward(f)))
    np.testing.assert_array_equal(laplacian_central(shift(f)), shift(laplacian_central(f)))
    q = np.stack([f, f[::-1]])
    np.testing.assert_array_equal(div_backward(shift(q)), shift(div_backward(q)))


@settings(max_examples=60, deadline=None)
@given(fields)
def test_constant_fields_are_in_the_kernel(f):
    c = np.full_like(f, f.flat[0])
    assert not grad_forward(c).any()
    assert not laplacian_central(c).any()
    assert not div_backward(np.stack([c, c])).any()


def test_inner_product_shape_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        inner_product(np.zeros((3, 3)), np.zeros((3, 4)))


def test_magnitude():
    q = np.stack([np.full((2, 2), 3.0), np.full((2, 2), 4.0)])
    assert np.array_equal(magnitude(q), np.full((2, 2), 5.0))


def test_heaviside_values():
    assert heaviside_smooth(0.0) == 0.5
    assert heaviside_smooth(1.5, 1.5) == pytest.approx(0.75)
    assert heaviside_smooth(-1e9) == pytest.approx(0.0, abs=1e-9)
    assert heaviside_smooth(1e9) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50), st.floats(0.1, 10))
def test_delta_is_derivative_of_heaviside(s, delta):
    h = 1e-6
    fd = (heaviside_smooth(s + h, delta) - heaviside_smooth(s - h, delta)) / (2 * h)
    assert delta_smooth(s, delta) == pytest.approx(fd, rel=1e-4, abs=1e-9)


def test_delta_integrates_to_one():
    total, _ = quad(lambda s: delta_smooth(s, 1.5), -np.inf, np.inf)
    assert total == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("fn", [heaviside_smooth, delta_smooth])
def test_nonpositive_delta_rejected(fn):
    with pytest.raises(ValueError):
        fn(0.0, 0.0)
