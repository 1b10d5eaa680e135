import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowcast.errors import ConfigError, ShapeError
from flowcast.numcore import (FixedRange, Glorot, activation, init_uniform, make_rng, matmul, relu,
                              sigmoid, tanh_act)

finite = st.floats(min_value=-1e300, max_value=1e300, allow_nan=False)


def test_sigmoid_known_values():
    assert sigmoid(np.array([0.0]))[0] == 0.5
    assert abs(sigmoid(np.array([1.0]))[0] - 1.0 / (1.0 + math.exp(-1.0))) < 1e-15
    assert abs(sigmoid(np.array([1.0]))[0] - 0.7310585786300049) < 1e-15


def test_sigmoid_saturation_stays_open():
    out = sigmoid(np.array([-1e308, -800.0, 800.0, 1e308]))
    assert np.all(np.isfinite(out))
    assert np.all(out > 0.0) and np.all(out < 1.0)


def test_tanh_saturation_stays_open():
    out = tanh_act(np.array([-1e6, 1e6]))
    assert np.all(np.abs(out) < 1.0)


@given(finite)
def test_sigmoid_symmetry(x):
    s = sigmoid(np.array([x, -x]))
    assert abs(s[0] + s[1] - 1.0) < 1e-15


@given(st.floats(min_value=-30, max_value=30))
def test_sigmoid_matches_direct_formula(x):
    assert abs(sigmoid(np.array([x]))[0] - 1.0 / (1.0 + math.exp(-x))) < 1e-15


@pytest.mark.parametrize("name", ["tanh", "sigmoid", "relu", "identity"])
def test_activation_derivatives_match_finite_differences(name):
    f, df = activation(name)
    z = np.linspace(-3, 3, 13) + 0.05
    h = 1e-6
    numeric = (f(z + h) - f(z - h)) / (2 * h)
    assert np.allclose(df(f(z)), numeric, atol=1e-8)


def test_unknown_activation():
    with pytest.raises(ConfigError):
        activation("softsign")


def test_matmul_shapes():
    a = np.arange(6.0).reshape(2, 3)
    b = np.arange(12.0).reshape(3, 4)
    assert np.array_equal(matmul(a, b), a @ b)
    with pytest.raises(ShapeError, match="cannot multiply 2x3 by 2x3"):
        matmul(a, a)
    with pytest.raises(ShapeError):
        matmul(np.zeros(3), b)


def test_relu():
    assert np.array_equal(relu(np.array([-1.0, 0.0, 2.0])), [0.0, 0.0, 2.0])


def test_make_rng_reproducible_and_streams_independent():
    a = make_rng(5).random(4)
    b = make_rng(5).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(make_rng(5, 0).random(4), make_rng(5, 1).random(4))
    with pytest.raises(ConfigError):
        make_rng(-1)


def test_init_uniform_glorot_bound():
    w = init_uniform(make_rng(0), 40, 60, Glorot())
    bound = math.sqrt(6.0 / 100)
    assert w.shape == (40, 60)
    assert np.all(np.abs(w) <= bound)
    assert w.max() > 0.9 * bound


def test_init_uniform_fixed_range():
    w = init_uniform(make_rng(0), 5, 5, FixedRange(0.5, 0.5))
    assert np.all(w == 0.5)
    with pytest.raises(ConfigError):
        init_uniform(make_rng(0), 2, 2, FixedRange(1.0, 0.0))
    with pytest.raises(ConfigError):
        init_uniform(make_rng(0), 0, 3)


@settings(max_examples=30)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(0, 2**32))
def test_init_uniform_deterministic(r, c, seed):
    assert np.array_equal(init_uniform(make_rng(seed), r, c), init_uniform(make_rng(seed), r, c))


@settings(max_examples=40)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(1, 8), st.integers(1, 8), st.integers(0, 10_000))
def test_matmul_associative(m, n, p, q, seed):
    rng = make_rng(seed)
    a, b, c = rng.normal(size=(m, n)), rng.normal(size=(n, p)), rng.normal(size=(p, q))
    assert np.max(np.abs(matmul(matmul(a, b), c) - matmul(a, matmul(b, c)))) <= 1e-10


@given(st.lists(st.floats(-30, 30), min_size=2, max_size=30, unique=True))
def test_activations_monotone(xs):
    # strictly increasing where the float result can still resolve the difference
    x = np.sort(np.array(xs))
    for f in (sigmoid, tanh_act):
        y = f(x)
        assert np.all(np.diff(y) >= 0)
    wide = np.sort(make_rng(len(xs)).uniform(-15, 15, 200))
    assert np.all(np.diff(sigmoid(wide)) > 0)
