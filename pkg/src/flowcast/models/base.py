"""Common plumbing for the hand-differentiated networks."""

from __future__ import annotations

import dataclasses

import numpy as np

from ..errors import ShapeError


class ParamSet:
    """Mixin for dataclasses whose ndarray fields are learnable parameters."""

    def arrays(self) -> dict[str, np.ndarray]:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
                if isinstance(getattr(self, f.name), np.ndarray)}

    def copy(self):
        return dataclasses.replace(self, **{k: v.copy() for k, v in self.arrays().items()})

    def zeros_like(self):
        return dataclasses.replace(self, **{k: np.zeros_like(v) for k, v in self.arrays().items()})

    def n_params(self) -> int:
        return sum(v.size for v in self.arrays().values())


def as_batch(x, width: int, what: str) -> tuple[np.ndarray, bool]:
    """Promote a single vector to a one-row batch; returns ``(batch, was_single)``."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != width:
        raise ShapeError(f"{what}: expected width {width}, got shape {x.shape}")
    return x, single


def as_window_batch(window, steps: int, width: int) -> tuple[np.ndarray, bool]:
    """Accept ``(steps, width)`` or ``(batch, steps, width)``; flat rows are reshaped."""
    w = np.asarray(window, dtype=np.float64)
    single = w.ndim == 2 and w.shape == (steps, width)
    if single:
        w = w[None]
    elif w.ndim == 2 and w.shape[1] == steps * width:
        w = w.reshape(w.shape[0], steps, width)
    if w.ndim != 3 or w.shape[1:] != (steps, width):
        raise ShapeError(f"expected window of {steps} steps x {width} inputs, got shape {np.shape(window)}")
    return w, single
