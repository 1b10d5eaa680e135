"""Vanilla recurrent cell: h = f_h(W^T h_prev + U^T x), y = f_o(V^T h)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..numcore import Glorot, Rng, activation, init_uniform
from .base import ParamSet, as_batch, as_window_batch


@dataclass
class RnnParams(ParamSet):
    W: np.ndarray        # hidden x hidden
    U: np.ndarray        # input x hidden
    V: np.ndarray        # hidden x output
    hidden_activation: str = "tanh"
    output_activation: str = "identity"

    def __post_init__(self):
        h = self.W.shape[0]
        if self.W.shape != (h, h) or self.U.ndim != 2 or self.U.shape[1] != h or self.V.ndim != 2 or self.V.shape[0] != h:
            raise ShapeError(f"inconsistent RNN shapes W{self.W.shape} U{self.U.shape} V{self.V.shape}")
        if self.hidden_activation not in ("tanh", "sigmoid"):
            raise ShapeError(f"hidden activation must be tanh or sigmoid, got {self.hidden_activation!r}")
        activation(self.output_activation)

    @property
    def hidden_size(self) -> int:
        return self.W.shape[0]

    @property
    def input_size(self) -> int:
        return self.U.shape[0]

    @classmethod
    def initialize(cls, rng: Rng, input_size: int, hidden_size: int, output_size: int = 1, **acts):
        return cls(init_uniform(rng, hidden_size, hidden_size, Glorot()),
                   init_uniform(rng, input_size, hidden_size, Glorot()),
                   init_uniform(rng, hidden_size, output_size, Glorot()), **acts)


def rnn_cell_forward(params: RnnParams, x_t, h_prev) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x_t, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    if x.shape[-1] != params.input_size or h_prev.shape[-1] != params.hidden_size:
        raise ShapeError(f"cell expects input {params.input_size} / hidden {params.hidden_size}, "
                         f"got {x.shape} / {h_prev.shape}")
    f_h, _ = activation(params.hidden_activation)
    f_o, _ = activation(params.output_activation)
    h = f_h(h_prev @ params.W + x @ params.U)
    return h, f_o(h @ params.V)


@dataclass
class RnnTrace:
    xs: np.ndarray
    hs: list          # h_0 (zeros) .. h_T
    y: np.ndarray
    single: bool


def rnn_sequence_forward(params: RnnParams, window, encoder_steps: int):
    """Scalar forecast from the output of the final step."""
    xs, single = as_window_batch(window, encoder_steps, params.input_size)
    hs = [np.zeros((xs.shape[0], params.hidden_size))]
    for t in range(encoder_steps):
        h, y = rnn_cell_forward(params, xs[:, t], hs[-1])
        hs.append(h)
    pred = y[:, 0]
    return (float(pred[0]) if single else pred), RnnTrace(xs, hs, y, single)


def rnn_backward(params: RnnParams, trace: RnnTrace, d_prediction) -> RnnParams:
    d = np.atleast_1d(np.asarray(d_prediction, dtype=np.float64))
    if d.shape != (trace.xs.shape[0],) or params.V.shape[1] != 1:
        raise ShapeError(f"d_prediction shape {d.shape} does not match a single-output trace")
    _, df_h = activation(params.hidden_activation)
    _, df_o = activation(params.output_activation)
    grads = params.zeros_like()
    dz_o = (d * df_o(trace.y[:, 0]))[:, None]
    grads.V[...] = trace.hs[-1].T @ dz_o
    dh = dz_o @ params.V.T
    for t in range(len(trace.hs) - 1, 0, -1):
        dz = dh * df_h(trace.hs[t])
        grads.W += trace.hs[t - 1].T @ dz
        grads.U += trace.xs[:, t - 1].T @ dz
        dh = dz @ params.W.T
    return grads


class RnnRegressor:
    kind = "rnn"

    def __init__(self, params: RnnParams, encoder_steps: int):
        self.params = params
        self.encoder_steps = encoder_steps

    @classmethod
    def initialize(cls, rng: Rng, n_variables: int, encoder_steps: int, hidden_size: int = 64):
        return cls(RnnParams.initialize(rng, n_variables, hidden_size), encoder_steps)

    def parameters(self):
        return self.params.arrays()

    def hyperparameters(self) -> dict:
        return {"hidden_size": self.params.hidden_size, "input_size": self.params.input_size,
                "encoder_steps": self.encoder_steps,
                "hidden_activation": self.params.hidden_activation,
                "output_activation": self.params.output_activation}

    def _windows(self, features):
        x, _ = as_batch(features, self.encoder_steps * self.params.input_size, "rnn features")
        return x.reshape(x.shape[0], self.encoder_steps, self.params.input_size)

    def predict(self, features) -> np.ndarray:
        return rnn_sequence_forward(self.params, self._windows(features), self.encoder_steps)[0]

    def forward(self, features):
        return rnn_sequence_forward(self.params, self._windows(features), self.encoder_steps)

    def backward(self, trace, d_pred):
        return rnn_backward(self.params, trace, d_pred).arrays()
