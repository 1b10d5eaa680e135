"""Per-column min-max scaling to [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DataError, ShapeError
from .windowing import SupervisedMatrix

EPSILON_GUARD = 1e-12


@dataclass(frozen=True)
class MinMaxScaler:
    names: tuple
    mins: np.ndarray
    maxs: np.ndarray
    epsilon_guard: float = EPSILON_GUARD

    def __post_init__(self):
        if self.mins.shape != self.maxs.shape or self.mins.shape != (len(self.names),):
            raise ShapeError(f"{len(self.names)} names for min/max of shapes {self.mins.shape}, {self.maxs.shape}")
        if np.any(self.mins > self.maxs):
            raise DataError("scaler has a column with min > max")

    @property
    def n_columns(self) -> int:
        return len(self.names)

    def _ranges(self) -> np.ndarray:
        rng = self.maxs - self.mins
        # constant columns: x - min == 0, so any nonzero divisor yields 0.0
        return np.where(rng > self.epsilon_guard, rng, 1.0)

    def _check(self, data: np.ndarray, cols) -> None:
        width = self.n_columns if cols is None else len(np.atleast_1d(np.arange(self.n_columns)[cols]))
        if data.shape[-1] != width:
            raise ShapeError(f"data has {data.shape[-1]} columns, scaler expects {width}")

    def transform(self, data, cols=None) -> np.ndarray:
        """Scale ``data``; ``cols`` optionally restricts to a subset of scaler columns."""
        data = np.asarray(data, dtype=np.float64)
        self._check(data, cols)
        sl = slice(None) if cols is None else cols
        return (data - self.mins[sl]) / self._ranges()[sl]

    def inverse_transform(self, scaled, cols=None) -> np.ndarray:
        scaled = np.asarray(scaled, dtype=np.float64)
        self._check(scaled, cols)
        sl = slice(None) if cols is None else cols
        return scaled * self._ranges()[sl] + self.mins[sl]

    # The supervised layout stores the target as the last scaler column.
    def scale_matrix(self, matrix: SupervisedMatrix) -> SupervisedMatrix:
        return matrix.replace(features=self.transform(matrix.features, slice(0, -1)),
                              targets=self.transform(matrix.targets[:, None], slice(-1, None))[:, 0])

    def inverse_targets(self, scaled_targets) -> np.ndarray:
        col = np.asarray(scaled_targets, dtype=np.float64).reshape(-1, 1)
        return self.inverse_transform(col, slice(-1, None))[:, 0]

    def save(self, path) -> None:
        lines = ["name,min,max"]
        lines += [f"{n},{lo:.17g},{hi:.17g}" for n, lo, hi in zip(self.names, self.mins, self.maxs)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "MinMaxScaler":
        names, mins, maxs = [], [], []
        rows = Path(path).read_text(encoding="utf-8").splitlines()
        if not rows or rows[0].strip() != "name,min,max":
            raise DataError(f"{path}: not a scaler file")
        for line in rows[1:]:
            if not line.strip():
                continue
            name, lo, hi = line.rsplit(",", 2)
            names.append(name)
            mins.append(float(lo))
            maxs.append(float(hi))
        return cls(tuple(names), np.array(mins), np.array(maxs))


def fit_scaler(data, names=None) -> MinMaxScaler:
    """Capture per-column min and max of a 2-d array or a :class:`SupervisedMatrix`.

    For a supervised matrix the target becomes the final column.
    """
    if isinstance(data, SupervisedMatrix):
        names = data.feature_names + (data.target_name,)
        data = np.column_stack([data.features, data.targets])
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 1:
        raise ShapeError(f"need a non-empty 2-d array, got shape {data.shape}")
    if names is None:
        names = tuple(f"c{j}" for j in range(data.shape[1]))
    return MinMaxScaler(tuple(names), data.min(axis=0), data.max(axis=0))
