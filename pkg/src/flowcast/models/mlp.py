"""One-hidden-layer perceptron on the flat feature vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..numcore import Glorot, Rng, activation, init_uniform
from .base import ParamSet, as_batch


@dataclass
class MlpParams(ParamSet):
    W1: np.ndarray       # input x hidden
    b1: np.ndarray
    W2: np.ndarray       # hidden x 1
    b2: np.ndarray
    hidden_activation: str = "tanh"

    def __post_init__(self):
        d, h = self.W1.shape
        if self.b1.shape != (h,) or self.W2.shape != (h, 1) or self.b2.shape != (1,):
            raise ShapeError(f"inconsistent MLP shapes W1{self.W1.shape} b1{self.b1.shape} "
                             f"W2{self.W2.shape} b2{self.b2.shape}")
        if self.hidden_activation not in ("tanh", "sigmoid", "relu"):
            raise ShapeError(f"unsupported hidden activation {self.hidden_activation!r}")

    @property
    def input_size(self) -> int:
        return self.W1.shape[0]

    @property
    def hidden_size(self) -> int:
        return self.W1.shape[1]

    @classmethod
    def initialize(cls, rng: Rng, input_size: int, hidden_size: int = 64, hidden_activation: str = "tanh"):
        return cls(init_uniform(rng, input_size, hidden_size, Glorot()), np.zeros(hidden_size),
                   init_uniform(rng, hidden_size, 1, Glorot()), np.zeros(1), hidden_activation)


@dataclass
class MlpTrace:
    x: np.ndarray
    a: np.ndarray
    single: bool


def mlp_forward(params: MlpParams, features):
    """Returns ``(prediction, trace)``; prediction is a float for a single vector."""
    x, single = as_batch(features, params.input_size, "mlp features")
    f, _ = activation(params.hidden_activation)
    a = f(x @ params.W1 + params.b1)
    y = a @ params.W2[:, 0] + params.b2[0]
    return (float(y[0]) if single else y), MlpTrace(x, a, single)


def mlp_backward(params: MlpParams, trace: MlpTrace, d_prediction) -> MlpParams:
    d = np.atleast_1d(np.asarray(d_prediction, dtype=np.float64))
    if d.shape != (trace.x.shape[0],):
        raise ShapeError(f"d_prediction has shape {d.shape}, trace holds {trace.x.shape[0]} rows")
    _, df = activation(params.hidden_activation)
    grads = params.zeros_like()
    grads.W2[:, 0] = trace.a.T @ d
    grads.b2[0] = d.sum()
    dz = np.outer(d, params.W2[:, 0]) * df(trace.a)
    grads.W1[...] = trace.x.T @ dz
    grads.b1[...] = dz.sum(axis=0)
    return grads


class MlpRegressor:
    kind = "mlp"

    def __init__(self, params: MlpParams):
        self.params = params

    @classmethod
    def initialize(cls, rng: Rng, n_features: int, hidden_size: int = 64, hidden_activation: str = "tanh"):
        return cls(MlpParams.initialize(rng, n_features, hidden_size, hidden_activation))

    def parameters(self):
        return self.params.arrays()

    def hyperparameters(self) -> dict:
        return {"hidden_size": self.params.hidden_size, "input_size": self.params.input_size,
                "hidden_activation": self.params.hidden_activation}

    def predict(self, features) -> np.ndarray:
        x, _ = as_batch(features, self.params.input_size, "mlp features")
        return mlp_forward(self.params, x)[0]

    def forward(self, features):
        x, _ = as_batch(features, self.params.input_size, "mlp features")
        return mlp_forward(self.params, x)

    def backward(self, trace, d_pred):
        return mlp_backward(self.params, trace, d_pred).arrays()
