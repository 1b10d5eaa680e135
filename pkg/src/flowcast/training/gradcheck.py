"""Central-difference verification of analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .loop import loss_and_grad


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_error: float
    worst_param: str
    worst_index: tuple
    n_checked: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tolerance


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)


def gradient_check(model, features, targets, step: float = 1e-6, tolerance: float = 1e-4,
                   loss: str = "mse", analytic: dict | None = None, params: list | None = None) -> GradCheckReport:
    """Compare ``model.backward`` with (f(theta+h) - f(theta-h)) / 2h for every parameter entry.

    ``analytic`` overrides the model's own gradients (useful for planting
    faults); ``params`` restricts the check to the named blocks.
    """
    features = np.asarray(features, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)

    def objective() -> float:
        pred, _ = model.forward(features)
        return loss_and_grad(loss, pred, targets)[0]

    if analytic is None:
        pred, trace = model.forward(features)
        _, d_pred = loss_and_grad(loss, pred, targets)
        analytic = model.backward(trace, d_pred)

    worst = (-1.0, "", ())
    count = 0
    for name, arr in model.parameters().items():
        if params is not None and name not in params:
            continue
        for idx in np.ndindex(arr.shape):
            orig = arr[idx]
            arr[idx] = orig + step
            f_plus = objective()
            arr[idx] = orig - step
            f_minus = objective()
            arr[idx] = orig
            numeric = (f_plus - f_minus) / (2.0 * step)
            err = relative_error(float(analytic[name][idx]), numeric)
            count += 1
            if err > worst[0]:
                worst = (err, name, idx)
    return GradCheckReport(worst[0], worst[1], worst[2], count, tolerance)
