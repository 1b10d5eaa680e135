"""Dense linear-algebra helpers, activations and seeded randomness.

Matrices and vectors are plain row-major ``float64`` numpy arrays. The
helpers here add the shape checks and saturation guards the models rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError

Rng = np.random.Generator

# Smallest positive double and largest double below one: keep activations
# strictly inside their open ranges even when the input saturates.
_TINY = np.nextafter(0.0, 1.0)
_ALMOST_ONE = np.nextafter(1.0, 0.0)


def make_rng(seed: int, stream: int | None = None) -> Rng:
    """Return a PCG64 generator; ``stream`` selects an independent substream."""
    if seed < 0:
        raise ConfigError(f"seed must be non-negative, got {seed}")
    key = seed if stream is None else [seed, stream]
    return np.random.Generator(np.random.PCG64(key))


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def as_vector(v) -> np.ndarray:
    x = np.asarray(v, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"expected a 1-d vector, got shape {x.shape}")
    return x


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return a @ b


def sigmoid(v) -> np.ndarray:
    """Elementwise logistic function, evaluated on the branch that never overflows."""
    x = np.asarray(v, dtype=np.float64)
    e = np.exp(-np.abs(x))
    r = 1.0 / (1.0 + e)
    out = np.where(x >= 0, r, e * r)
    return np.clip(out, _TINY, _ALMOST_ONE, out=out)


def tanh_act(v) -> np.ndarray:
    x = np.asarray(v, dtype=np.float64)
    return np.clip(np.tanh(x), -_ALMOST_ONE, _ALMOST_ONE)


def relu(v) -> np.ndarray:
    return np.maximum(np.asarray(v, dtype=np.float64), 0.0)


def identity(v) -> np.ndarray:
    return np.asarray(v, dtype=np.float64)


# Derivatives expressed through the activation output y = f(z).
ACTIVATIONS = {
    "tanh": (tanh_act, lambda y: 1.0 - y * y),
    "sigmoid": (sigmoid, lambda y: y * (1.0 - y)),
    "relu": (relu, lambda y: (y > 0).astype(np.float64)),
    "identity": (identity, np.ones_like),
}


def activation(name: str):
    """Look up ``(f, df_from_output)`` by name."""
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise ConfigError(f"unknown activation {name!r}; choose from {sorted(ACTIVATIONS)}") from None


@dataclass(frozen=True)
class Glorot:
    pass


@dataclass(frozen=True)
class FixedRange:
    lo: float
    hi: float


def init_uniform(rng: Rng, rows: int, cols: int, scale_rule=Glorot()) -> np.ndarray:
    """Draw a ``rows x cols`` matrix from a uniform distribution.

    ``Glorot()`` uses the bound sqrt(6 / (rows + cols)); ``FixedRange(lo, hi)``
    draws from [lo, hi).
    """
    if rows < 1 or cols < 1:
        raise ConfigError(f"matrix dimensions must be >= 1, got {rows}x{cols}")
    if isinstance(scale_rule, Glorot):
        bound = np.sqrt(6.0 / (rows + cols))
        lo, hi = -bound, bound
    elif isinstance(scale_rule, FixedRange):
        lo, hi = float(scale_rule.lo), float(scale_rule.hi)
        if lo > hi:
            raise ConfigError(f"degenerate range: lo={lo} > hi={hi}")
    else:
        raise ConfigError(f"unknown scale rule {scale_rule!r}")
    return rng.uniform(lo, hi, size=(rows, cols))
