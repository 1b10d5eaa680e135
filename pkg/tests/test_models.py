import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowcast.errors import ShapeError
from flowcast.models import (LstmParams, LstmRegressor, LstmState, MlpParams, MlpRegressor, RnnParams,
                             RnnRegressor, lstm_cell_forward, lstm_sequence_forward, mlp_forward,
                             rnn_cell_forward, rnn_sequence_forward)
from flowcast.numcore import make_rng
from flowcast.training import gradient_check

from oracles import lstm_cell_scalar, rnn_cell_scalar


def perturbed_lstm(rng, d, h):
    p = LstmParams.initialize(rng, d, h)
    for a in p.arrays().values():
        a += rng.normal(0, 0.3, a.shape)
    return p


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10_000))
def test_lstm_cell_matches_scalar_oracle(d, h, seed):
    rng = make_rng(seed)
    p = perturbed_lstm(rng, d, h)
    x, h0, c0 = rng.normal(size=d), rng.normal(size=h), rng.normal(size=h)
    state, _ = lstm_cell_forward(p, x, LstmState(h0, c0))
    h_ref, c_ref = lstm_cell_scalar(p, x, h0, c0)
    assert np.max(np.abs(state.h - h_ref)) < 1e-12
    assert np.max(np.abs(state.c - c_ref)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10_000), st.sampled_from(["tanh", "sigmoid"]))
def test_rnn_cell_matches_scalar_oracle(d, h, seed, act):
    rng = make_rng(seed)
    p = RnnParams.initialize(rng, d, h, hidden_activation=act)
    x, h0 = rng.normal(size=d), rng.normal(size=h)
    h1, y = rnn_cell_forward(p, x, h0)
    h_ref, y_ref = rnn_cell_scalar(p, x, h0)
    assert np.max(np.abs(h1 - h_ref)) < 1e-12
    assert np.max(np.abs(y - y_ref)) < 1e-12


def test_lstm_sequence_equals_repeated_cell():
    rng = make_rng(1)
    p = perturbed_lstm(rng, 3, 4)
    window = rng.normal(size=(5, 3))
    state = LstmState.zeros(4)
    for t in range(5):
        state, _ = lstm_cell_forward(p, window[t], state)
    pred, trace = lstm_sequence_forward(p, window)
    assert isinstance(pred, float)
    assert abs(pred - (state.h @ p.V_out[:, 0] + p.b_out[0])) < 1e-12
    assert len(trace.steps) == 5


def test_lstm_batch_and_flat_inputs_agree():
    rng = make_rng(2)
    m = LstmRegressor(perturbed_lstm(rng, 2, 3), encoder_steps=4)
    x = rng.normal(size=(7, 8))
    batch, _ = m.forward(x)
    singles = [lstm_sequence_forward(m.params, row.reshape(4, 2))[0] for row in x]
    assert np.allclose(batch, singles, atol=1e-13)
    assert np.allclose(m.predict(x), batch, atol=1e-13)
    one = m.predict(x[:1])
    assert one.shape == (1,)


def test_lstm_predict_chunking_is_exact():
    rng = make_rng(3)
    m = LstmRegressor(perturbed_lstm(rng, 2, 3), encoder_steps=3)
    x = rng.normal(size=(1100, 6))
    assert np.allclose(m.predict(x), m.forward(x)[0], atol=1e-13)


def test_lstm_forget_bias_and_shapes():
    p = LstmParams.initialize(make_rng(0), 12, 64)
    assert np.all(p.b_g == 1.0) and np.all(p.b_i == 0.0)
    assert p.U_g.shape == (64, 12) and p.W_o.shape == (64, 64) and p.V_out.shape == (64, 1)
    with pytest.raises(ShapeError):
        LstmParams(**{**p.arrays(), "W_c": np.zeros((3, 3))})
    with pytest.raises(ShapeError):
        lstm_sequence_forward(p, np.zeros((5, 11)))


def test_rnn_and_mlp_shapes():
    rng = make_rng(4)
    r = RnnRegressor.initialize(rng, 3, 5, hidden_size=4)
    assert r.predict(rng.random((6, 15))).shape == (6,)
    with pytest.raises(ShapeError):
        r.predict(rng.random((6, 14)))
    m = MlpRegressor.initialize(rng, 10, 7)
    assert m.predict(rng.random((4, 10))).shape == (4,)
    pred, _ = mlp_forward(m.params, rng.random(10))
    assert isinstance(pred, float)
    with pytest.raises(ShapeError):
        MlpParams(np.zeros((3, 2)), np.zeros(3), np.zeros((2, 1)), np.zeros(1))


def test_rnn_single_window():
    p = RnnParams.initialize(make_rng(5), 2, 3)
    pred, trace = rnn_sequence_forward(p, np.ones((4, 2)), 4)
    assert isinstance(pred, float) and len(trace.hs) == 5


@pytest.mark.parametrize("hidden, enc, dim", [(2, 2, 1), (4, 3, 5), (8, 6, 12), (3, 1, 2)])
def test_lstm_gradients(hidden, enc, dim):
    rng = make_rng(2024 + hidden)
    m = LstmRegressor(perturbed_lstm(rng, dim, hidden), enc)
    x = rng.random((3, enc * dim))
    y = rng.random(3)
    rep = gradient_check(m, x, y, tolerance=1e-4)
    assert rep.passed, rep


@pytest.mark.parametrize("act", ["tanh", "sigmoid"])
def test_rnn_gradients(act):
    rng = make_rng(8)
    m = RnnRegressor(RnnParams.initialize(rng, 3, 4, hidden_activation=act), 5)
    rep = gradient_check(m, rng.random((4, 15)), rng.random(4), tolerance=1e-5)
    assert rep.passed, rep


@pytest.mark.parametrize("act", ["tanh", "sigmoid", "relu"])
def test_mlp_gradients(act):
    rng = make_rng(9)
    m = MlpRegressor.initialize(rng, 6, 5, act)
    m.params.b1 += rng.normal(0, 0.1, 5)
    # relu leaves some entries with gradients near 1e-5, where round-off in the
    # difference quotient alone is ~1e-6 relative
    rep = gradient_check(m, rng.random((5, 6)), rng.random(5), tolerance=1e-5 if act == "relu" else 1e-6)
    assert rep.passed, rep


def test_gradient_check_detects_planted_fault():
    rng = make_rng(10)
    m = MlpRegressor.initialize(rng, 4, 3)
    x, y = rng.random((5, 4)), rng.random(5)
    pred, trace = m.forward(x)
    grads = m.backward(trace, 2 * (pred - y) / 5)
    grads["W1"][1, 2] *= 1.5
    rep = gradient_check(m, x, y, analytic=grads)
    assert not rep.passed
    assert rep.worst_param == "W1" and rep.worst_index == (1, 2)


def test_zero_weight_cell_halves_the_state():
    p = LstmParams.initialize(make_rng(0), 1, 1, forget_bias=0.0)
    for a in p.arrays().values():
        a[...] = 0.0
    state, trace = lstm_cell_forward(p, np.array([3.0]), LstmState(np.zeros(1), np.array([2.0])))
    assert state.c[0] == 1.0
    assert abs(state.h[0] - 0.5 * np.tanh(1.0)) < 1e-15


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(1e-3, 1e4))
def test_gates_bounded_and_closed_input_contracts(seed, scale):
    rng = make_rng(seed)
    p = perturbed_lstm(rng, 3, 4)
    x, h0, c0 = rng.normal(0, scale, 3), rng.normal(size=4), rng.normal(0, 5, 4)
    _, tr = lstm_cell_forward(p, x, LstmState(h0, c0))
    for gate in (tr.g, tr.i, tr.o):
        assert np.all((gate > 0) & (gate < 1))
    assert np.all(np.abs(tr.c_tilde) < 1)
    # forcing the input gate shut leaves only the forget term
    p.b_i[...] = -1e6
    p.U_i[...] = 0.0
    p.W_i[...] = 0.0
    state, tr = lstm_cell_forward(p, x, LstmState(h0, c0))
    assert np.all(np.abs(state.c) <= np.abs(c0))


def test_forward_is_bit_deterministic():
    rng = make_rng(6)
    m = LstmRegressor(perturbed_lstm(rng, 2, 5), 4)
    x = rng.random((9, 8))
    assert np.array_equal(m.predict(x), m.predict(x.copy()))
    assert np.array_equal(m.forward(x)[0], m.forward(x)[0])


def test_gradient_check_flags_doubled_gradient():
    rng = make_rng(11)
    m = LstmRegressor(perturbed_lstm(rng, 3, 4), 3)
    x, y = rng.random((3, 9)), rng.random(3)
    pred, trace = m.forward(x)
    grads = {k: 2 * v for k, v in m.backward(trace, 2 * (pred - y) / 3).items()}
    assert gradient_check(m, x, y, analytic=grads).max_rel_error > 0.3
