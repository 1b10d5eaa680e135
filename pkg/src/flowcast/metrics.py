"""Forecast skill: RMSE, MAE and the coefficient of determination."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ShapeError, UndefinedMetricError

OBSERVED_MEAN = "observed_mean"
PREDICTED_MEAN = "predicted_mean"
R2_CONVENTIONS = (OBSERVED_MEAN, PREDICTED_MEAN)

# Published reference results on a real catchment (m3/s for RMSE and MAE).
# The source data are not public, so these are display values only and are
# never recomputed.
PUBLISHED_COMPARISON = {
    "svr": {"rmse": 136.022, "mae": 63.939, "r2": 0.917},
    "mlp": {"rmse": 99.359, "mae": 35.248, "r2": 0.956},
    "lstm": {"rmse": 82.007, "mae": 27.752, "r2": 0.970},
}

# Input-combination study, keyed by (with_flow, rainfall inputs).
PUBLISHED_INPUT_STUDY = {
    ("flow", "none"): {"rmse": 148.864, "mae": 43.188, "r2": 0.900},
    ("flow", "rain"): {"rmse": 82.007, "mae": 27.752, "r2": 0.970},
    ("flow", "areal"): {"rmse": 94.008, "mae": 29.751, "r2": 0.960},
    ("flow", "rain+areal"): {"rmse": 85.772, "mae": 30.138, "r2": 0.967},
    ("no_flow", "rain"): {"rmse": 274.344, "mae": 156.489, "r2": 0.661},
    ("no_flow", "areal"): {"rmse": 282.146, "mae": 157.497, "r2": 0.639},
    ("no_flow", "rain+areal"): {"rmse": 282.126, "mae": 152.190, "r2": 0.641},
}


def _pair(predicted, observed, min_len=1):
    p = np.asarray(predicted, dtype=np.float64)
    o = np.asarray(observed, dtype=np.float64)
    if p.ndim != 1 or p.shape != o.shape:
        raise ShapeError(f"predicted {p.shape} and observed {o.shape} must be vectors of equal length")
    if p.size < min_len:
        raise ShapeError(f"need at least {min_len} values, got {p.size}")
    return p, o


def rmse(predicted, observed) -> float:
    p, o = _pair(predicted, observed)
    r = p - o
    return float(np.sqrt(np.mean(r * r)))


def mae(predicted, observed) -> float:
    p, o = _pair(predicted, observed)
    return float(np.mean(np.abs(p - o)))


def r2(predicted, observed, convention: str = OBSERVED_MEAN) -> float:
    """1 - SS_res / SS_tot.

    With ``convention="predicted_mean"`` the total variation is taken around
    and over the predictions instead of the observations.
    """
    p, o = _pair(predicted, observed, min_len=2)
    if convention == OBSERVED_MEAN:
        ref = o
    elif convention == PREDICTED_MEAN:
        ref = p
    else:
        raise ValueError(f"unknown R2 convention {convention!r}; choose from {R2_CONVENTIONS}")
    dev = ref - ref.mean()
    ss_tot = float(np.sum(dev * dev))
    if ss_tot == 0.0:
        raise UndefinedMetricError("R2 undefined: reference series is constant")
    res = p - o
    return 1.0 - float(np.sum(res * res)) / ss_tot


@dataclass(frozen=True)
class EvalReport:
    run_id: str
    n: int
    rmse: float
    mae: float
    r2: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def csv_header() -> str:
        return "run_id,n,rmse,mae,r2"

    def to_csv_row(self) -> str:
        return f"{self.run_id},{self.n},{self.rmse!r},{self.mae!r},{self.r2!r}"


def evaluate(predicted, observed, run_id: str = "run", convention: str = OBSERVED_MEAN) -> EvalReport:
    report = EvalReport(run_id, int(np.size(observed)), rmse(predicted, observed), mae(predicted, observed),
                        r2(predicted, observed, convention))
    # RMS >= mean of |r|; allow for rounding when all residuals share one magnitude
    assert report.rmse >= report.mae * (1.0 - 1e-12), (report.rmse, report.mae)
    return report
