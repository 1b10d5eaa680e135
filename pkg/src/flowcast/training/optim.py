"""First-order optimizers operating in place on dicts of parameter arrays."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, ShapeError, TrainingDivergence

OPTIMIZERS = ("momentum", "adagrad", "rmsprop", "adam")


class Optimizer:
    def __init__(self, learning_rate: float):
        if learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {learning_rate}")
        self.learning_rate = learning_rate
        self.t = 0
        self.slots: dict[str, dict[str, np.ndarray]] = {}

    def _slot(self, name: str, key: str, like: np.ndarray) -> np.ndarray:
        slot = self.slots.setdefault(key, {})
        if name not in slot:
            slot[name] = np.zeros_like(like)
        elif slot[name].shape != like.shape:
            raise ShapeError(f"{key} accumulator for {name} has shape {slot[name].shape}, parameter {like.shape}")
        return slot[name]

    def step(self, params: dict, grads: dict) -> None:
        """Update ``params`` in place from ``grads`` (same keys and shapes)."""
        for name, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise TrainingDivergence(f"non-finite gradient in parameter block {name}", block=name)
            if params[name].shape != g.shape:
                raise ShapeError(f"gradient for {name} has shape {g.shape}, parameter {params[name].shape}")
        self.t += 1
        for name, g in grads.items():
            params[name] -= self._update(name, params[name], g)

    def _update(self, name, p, g):
        raise NotImplementedError


class Momentum(Optimizer):
    def __init__(self, learning_rate=0.001, momentum=0.9):
        super().__init__(learning_rate)
        self.momentum = momentum

    def _update(self, name, p, g):
        v = self._slot(name, "velocity", p)
        v *= self.momentum
        v += self.learning_rate * g
        return v


class Adagrad(Optimizer):
    def __init__(self, learning_rate=0.001, eps=1e-8):
        super().__init__(learning_rate)
        self.eps = eps

    def _update(self, name, p, g):
        acc = self._slot(name, "sum_sq", p)
        acc += g * g
        return self.learning_rate * g / (np.sqrt(acc) + self.eps)


class RMSProp(Optimizer):
    def __init__(self, learning_rate=0.001, rho=0.9, eps=1e-8):
        super().__init__(learning_rate)
        self.rho = rho
        self.eps = eps

    def _update(self, name, p, g):
        acc = self._slot(name, "mean_sq", p)
        acc *= self.rho
        acc += (1.0 - self.rho) * g * g
        return self.learning_rate * g / (np.sqrt(acc) + self.eps)


class Adam(Optimizer):
    def __init__(self, learning_rate=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        super().__init__(learning_rate)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps

    def _update(self, name, p, g):
        m = self._slot(name, "m", p)
        v = self._slot(name, "v", p)
        m *= self.beta1
        m += (1.0 - self.beta1) * g
        v *= self.beta2
        v += (1.0 - self.beta2) * g * g
        m_hat = m / (1.0 - self.beta1 ** self.t)
        v_hat = v / (1.0 - self.beta2 ** self.t)
        return self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(name: str, learning_rate: float) -> Optimizer:
    try:
        cls = {"momentum": Momentum, "adagrad": Adagrad, "rmsprop": RMSProp, "adam": Adam}[name.lower()]
    except KeyError:
        raise ConfigError(f"unknown optimizer {name!r}; choose from {OPTIMIZERS}") from None
    return cls(learning_rate=learning_rate)


def clip_by_global_norm(grads: dict, max_norm: float) -> float:
    """Rescale ``grads`` in place so their joint L2 norm is at most ``max_norm``; returns the original norm."""
    norm = float(np.sqrt(sum(float(np.vdot(g, g)) for g in grads.values())))
    if max_norm and norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm
