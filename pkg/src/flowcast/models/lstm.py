"""LSTM cell, sequence forward pass and backpropagation through time.

Gate equations, with ``*`` elementwise::

    g = sigmoid(U_g x + W_g h_prev + b_g)        forget
    i = sigmoid(U_i x + W_i h_prev + b_i)        input
    c~ = tanh(U_c x + W_c h_prev + b_c)          candidate
    c = g * c_prev + i * c~
    o = sigmoid(U_o x + W_o h_prev + b_o)        output
    h = o * tanh(c)

``U_*`` are stored ``hidden x input`` and ``W_*`` ``hidden x hidden`` so the
code reads like the equations; a window is read left to right from a zero
state and the forecast is ``V_out^T h_last + b_out``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..numcore import Glorot, Rng, init_uniform, sigmoid, tanh_act
from .base import ParamSet, as_batch, as_window_batch

GATES = ("g", "i", "c", "o")


@dataclass
class LstmParams(ParamSet):
    U_g: np.ndarray
    U_i: np.ndarray
    U_c: np.ndarray
    U_o: np.ndarray
    W_g: np.ndarray
    W_i: np.ndarray
    W_c: np.ndarray
    W_o: np.ndarray
    b_g: np.ndarray
    b_i: np.ndarray
    b_c: np.ndarray
    b_o: np.ndarray
    V_out: np.ndarray
    b_out: np.ndarray

    def __post_init__(self):
        h, d = self.U_g.shape
        if h < 1:
            raise ShapeError("hidden_size must be >= 1")
        for k in GATES:
            if getattr(self, f"U_{k}").shape != (h, d):
                raise ShapeError(f"U_{k} has shape {getattr(self, f'U_{k}').shape}, expected {(h, d)}")
            if getattr(self, f"W_{k}").shape != (h, h):
                raise ShapeError(f"W_{k} has shape {getattr(self, f'W_{k}').shape}, expected {(h, h)}")
            if getattr(self, f"b_{k}").shape != (h,):
                raise ShapeError(f"b_{k} has shape {getattr(self, f'b_{k}').shape}, expected {(h,)}")
        if self.V_out.shape != (h, 1) or self.b_out.shape != (1,):
            raise ShapeError(f"readout shapes {self.V_out.shape}, {self.b_out.shape}; expected {(h, 1)}, (1,)")

    @property
    def hidden_size(self) -> int:
        return self.U_g.shape[0]

    @property
    def input_size(self) -> int:
        return self.U_g.shape[1]

    @classmethod
    def initialize(cls, rng: Rng, input_size: int, hidden_size: int = 64, forget_bias: float = 1.0):
        """Glorot-uniform weights, zero biases except the forget gate."""
        h, d = hidden_size, input_size
        kw = {}
        for k in GATES:
            kw[f"U_{k}"] = init_uniform(rng, h, d, Glorot())
            kw[f"W_{k}"] = init_uniform(rng, h, h, Glorot())
        for k in GATES:
            kw[f"b_{k}"] = np.full(h, forget_bias if k == "g" else 0.0)
        kw["V_out"] = init_uniform(rng, h, 1, Glorot())
        kw["b_out"] = np.zeros(1)
        return cls(**kw)


@dataclass
class LstmState:
    h: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, hidden_size: int, batch: int | None = None):
        shape = (hidden_size,) if batch is None else (batch, hidden_size)
        return cls(np.zeros(shape), np.zeros(shape))


@dataclass
class GateTrace:
    """Activations of one step, kept for the backward pass."""

    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    g: np.ndarray
    i: np.ndarray
    c_tilde: np.ndarray
    o: np.ndarray
    c: np.ndarray
    tanh_c: np.ndarray


@dataclass
class SequenceTrace:
    steps: list
    h_last: np.ndarray
    single: bool


def lstm_cell_forward(params: LstmParams, x_t, state_prev: LstmState) -> tuple[LstmState, GateTrace]:
    """One step; ``x_t`` may be a vector or a ``(batch, input)`` matrix."""
    x = np.asarray(x_t, dtype=np.float64)
    if x.shape[-1] != params.input_size:
        raise ShapeError(f"input has {x.shape[-1]} features, cell expects {params.input_size}")
    h_prev, c_prev = state_prev.h, state_prev.c
    if h_prev.shape[-1] != params.hidden_size or c_prev.shape != h_prev.shape:
        raise ShapeError(f"state shapes {h_prev.shape}/{c_prev.shape} do not match hidden {params.hidden_size}")

    def pre(k):
        return x @ getattr(params, f"U_{k}").T + h_prev @ getattr(params, f"W_{k}").T + getattr(params, f"b_{k}")

    g = sigmoid(pre("g"))
    i = sigmoid(pre("i"))
    c_tilde = tanh_act(pre("c"))
    o = sigmoid(pre("o"))
    c = g * c_prev + i * c_tilde
    tanh_c = tanh_act(c)
    h = o * tanh_c
    return LstmState(h, c), GateTrace(x, h_prev, c_prev, g, i, c_tilde, o, c, tanh_c)


# Stacked row order puts the three sigmoid gates first so one call covers them.
_STACK = ("g", "i", "o", "c")


def _stacked(params: LstmParams):
    U = np.vstack([getattr(params, f"U_{k}") for k in _STACK])
    W = np.vstack([getattr(params, f"W_{k}") for k in _STACK])
    b = np.concatenate([getattr(params, f"b_{k}") for k in _STACK])
    return U, W, b


def lstm_sequence_forward(params: LstmParams, window, encoder_steps: int | None = None):
    """Run a window (or batch of windows) and apply the linear readout.

    ``window`` is ``(steps, input)``, ``(batch, steps, input)`` or flat
    ``(batch, steps * input)`` rows. Returns ``(prediction, trace)``; the
    prediction is a float for a single window and a ``(batch,)`` array otherwise.
    """
    w = np.asarray(window, dtype=np.float64)
    steps = encoder_steps
    if steps is None:
        if w.ndim not in (2, 3) or w.shape[-1] != params.input_size:
            raise ShapeError(f"cannot infer window length from shape {w.shape}")
        steps = w.shape[-2]
    xs, single = as_window_batch(w, steps, params.input_size)
    batch, H = xs.shape[0], params.hidden_size
    U, W, b = _stacked(params)
    # input projections for all steps in one product
    zx = xs @ U.T + b
    h = np.zeros((batch, H))
    c = np.zeros((batch, H))
    trace = []
    for t in range(steps):
        z = zx[:, t] + h @ W.T
        gio = sigmoid(z[:, :3 * H])
        g, i, o = gio[:, :H], gio[:, H:2 * H], gio[:, 2 * H:]
        c_tilde = tanh_act(z[:, 3 * H:])
        c_new = g * c + i * c_tilde
        tanh_c = tanh_act(c_new)
        h_new = o * tanh_c
        trace.append(GateTrace(xs[:, t], h, c, g, i, c_tilde, o, c_new, tanh_c))
        h, c = h_new, c_new
    pred = h @ params.V_out[:, 0] + params.b_out[0]
    return (float(pred[0]) if single else pred), SequenceTrace(trace, h, single)


def lstm_predict(params: LstmParams, features, encoder_steps: int, chunk: int = 512) -> np.ndarray:
    """Batch inference without keeping the trace, in row chunks to bound memory."""
    xs, _ = as_window_batch(features, encoder_steps, params.input_size)
    H = params.hidden_size
    U, W, b = _stacked(params)
    out = np.empty(xs.shape[0])
    for lo in range(0, xs.shape[0], chunk):
        zx = xs[lo:lo + chunk] @ U.T + b
        h = np.zeros((zx.shape[0], H))
        c = np.zeros_like(h)
        for t in range(encoder_steps):
            z = zx[:, t] + h @ W.T
            gio = sigmoid(z[:, :3 * H])
            c = gio[:, :H] * c + gio[:, H:2 * H] * tanh_act(z[:, 3 * H:])
            h = gio[:, 2 * H:] * tanh_act(c)
        out[lo:lo + chunk] = h @ params.V_out[:, 0] + params.b_out[0]
    return out


def lstm_backward(params: LstmParams, trace: SequenceTrace, d_prediction) -> LstmParams:
    """Gradients of ``sum(d_prediction * prediction)`` with respect to every parameter."""
    d = np.atleast_1d(np.asarray(d_prediction, dtype=np.float64))
    batch = trace.h_last.shape[0]
    if d.shape != (batch,):
        raise ShapeError(f"d_prediction has shape {d.shape}, trace holds {batch} windows")
    if trace.h_last.shape[1] != params.hidden_size or (trace.steps and trace.steps[0].x.shape[1] != params.input_size):
        raise ShapeError("trace was produced by parameters of a different shape")
    grads = params.zeros_like()
    grads.V_out[:, 0] = trace.h_last.T @ d
    grads.b_out[0] = d.sum()
    U, W, _ = _stacked(params)
    H = params.hidden_size
    dU = np.zeros_like(U)
    dW = np.zeros_like(W)
    db = np.zeros(4 * H)
    dh = np.outer(d, params.V_out[:, 0])
    dc = np.zeros_like(dh)
    for st in reversed(trace.steps):
        dc = dc + dh * st.o * (1.0 - st.tanh_c ** 2)
        dz = np.hstack([
            dc * st.c_prev * st.g * (1.0 - st.g),
            dc * st.c_tilde * st.i * (1.0 - st.i),
            dh * st.tanh_c * st.o * (1.0 - st.o),
            dc * st.i * (1.0 - st.c_tilde ** 2),
        ])
        dU += dz.T @ st.x
        dW += dz.T @ st.h_prev
        db += dz.sum(axis=0)
        dh = dz @ W
        dc = dc * st.g
    for n, k in enumerate(_STACK):
        rows = slice(n * H, (n + 1) * H)
        getattr(grads, f"U_{k}")[...] = dU[rows]
        getattr(grads, f"W_{k}")[...] = dW[rows]
        getattr(grads, f"b_{k}")[...] = db[rows]
    return grads


class LstmRegressor:
    """Single-layer LSTM forecaster over windows of ``encoder_steps`` hours."""

    kind = "lstm"

    def __init__(self, params: LstmParams, encoder_steps: int):
        self.params = params
        self.encoder_steps = encoder_steps

    @classmethod
    def initialize(cls, rng: Rng, n_variables: int, encoder_steps: int, hidden_size: int = 64):
        return cls(LstmParams.initialize(rng, n_variables, hidden_size), encoder_steps)

    def parameters(self) -> dict[str, np.ndarray]:
        return self.params.arrays()

    def hyperparameters(self) -> dict:
        return {"hidden_size": self.params.hidden_size, "input_size": self.params.input_size,
                "encoder_steps": self.encoder_steps}

    def _windows(self, features) -> np.ndarray:
        x, _ = as_batch(features, self.encoder_steps * self.params.input_size, "lstm features")
        return x.reshape(x.shape[0], self.encoder_steps, self.params.input_size)

    def predict(self, features) -> np.ndarray:
        return lstm_predict(self.params, self._windows(features), self.encoder_steps)

    def forward(self, features):
        return lstm_sequence_forward(self.params, self._windows(features), self.encoder_steps)

    def backward(self, trace, d_pred) -> dict[str, np.ndarray]:
        return lstm_backward(self.params, trace, d_pred).arrays()
