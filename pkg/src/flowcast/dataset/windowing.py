"""Series-to-supervised transform and chronological splitting."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ConfigError, EmptyWindowError
from .table import AREAL, FLOW, RAIN, TimeSeriesTable, with_areal

VARIABLE_GROUPS = ("flow", "rain", "areal")


def selected_columns(variables) -> tuple[str, ...]:
    """Map a selection over {flow, rain, areal} to ordered column names."""
    chosen = set(variables)
    unknown = chosen - set(VARIABLE_GROUPS)
    if unknown:
        raise ConfigError(f"unknown variable group(s) {sorted(unknown)}; choose from {VARIABLE_GROUPS}")
    if not chosen:
        raise ConfigError("at least one variable group must be selected")
    cols = ()
    if "flow" in chosen:
        cols += (FLOW,)
    if "rain" in chosen:
        cols += RAIN
    if "areal" in chosen:
        cols += (AREAL,)
    return cols


def lag_label(name: str, offset: int) -> str:
    return f"{name}(t)" if offset == 0 else f"{name}(t{offset:+d})"


def supervised_headings(columns, encoder_steps: int, predict_step: int) -> list[str]:
    """Every column of the unselected transform, offsets t-encoder .. t+predict-1."""
    return [lag_label(c, off) for off in range(-encoder_steps, predict_step) for c in columns]


@dataclass(frozen=True)
class SupervisedMatrix:
    features: np.ndarray
    targets: np.ndarray
    feature_names: tuple
    encoder_steps: int
    predict_step: int
    variables: tuple
    target_name: str
    target_timestamps: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    def sequences(self) -> np.ndarray:
        """Features reshaped to ``(n_samples, encoder_steps, n_variables)``."""
        return self.features.reshape(self.n_samples, self.encoder_steps, self.n_variables)

    def replace(self, features=None, targets=None, rows=None) -> "SupervisedMatrix":
        f = self.features if features is None else features
        t = self.targets if targets is None else targets
        ts = self.target_timestamps
        if rows is not None:
            f, t, ts = f[rows], t[rows], ts[rows]
        return SupervisedMatrix(f, t, self.feature_names, self.encoder_steps, self.predict_step,
                                self.variables, self.target_name, ts)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.features).tobytes())
        h.update(np.ascontiguousarray(self.targets).tobytes())
        return h.hexdigest()


def series_to_supervised(table: TimeSeriesTable, encoder_steps: int, predict_step: int,
                         variables=("flow", "rain")) -> SupervisedMatrix:
    """Flatten lagged windows into feature rows with a future-flow target.

    A row anchored at t takes the selected variables at t-encoder_steps .. t-1
    (time-major, variables in table order within each step) and the target
    Q(t+predict_step-1). Windows never span a segment break.
    """
    if encoder_steps < 1 or predict_step < 1:
        raise ConfigError(f"encoder_steps and predict_step must be >= 1, got {encoder_steps}, {predict_step}")
    cols = selected_columns(variables)
    if AREAL in cols:
        table = with_areal(table)
    data = np.column_stack([table.column(c) for c in cols])
    flow = table.column(FLOW)
    span = encoder_steps + predict_step

    feats, targs, stamps, lengths = [], [], [], []
    for start, stop in table.segments():
        lengths.append(stop - start)
        n = stop - start - span + 1
        if n <= 0:
            continue
        # windows[k] covers rows start+k .. start+k+encoder_steps-1
        windows = sliding_window_view(data[start:stop], encoder_steps, axis=0)[:n]
        feats.append(windows.transpose(0, 2, 1).reshape(n, -1))
        tgt = np.arange(n) + start + span - 1
        targs.append(flow[tgt])
        stamps.append(table.timestamps[tgt])
    if not feats:
        raise EmptyWindowError(
            f"no segment is longer than encoder_steps + predict_step - 1 = {span - 1}; "
            f"segment lengths: {lengths}", lengths)
    names = tuple(lag_label(c, off) for off in range(-encoder_steps, 0) for c in cols)
    return SupervisedMatrix(
        features=np.ascontiguousarray(np.vstack(feats)),
        targets=np.concatenate(targs),
        feature_names=names,
        encoder_steps=encoder_steps,
        predict_step=predict_step,
        variables=cols,
        target_name=lag_label(FLOW, predict_step - 1),
        target_timestamps=np.concatenate(stamps),
    )


def resolve_train_count(n_samples: int, train_count=None, train_fraction=None) -> int:
    if (train_count is None) == (train_fraction is None):
        raise ConfigError("give exactly one of train_count or train_fraction")
    if train_fraction is not None:
        if not 0.0 < train_fraction < 1.0:
            raise ConfigError(f"train_fraction must lie in (0, 1), got {train_fraction}")
        train_count = int(round(n_samples * train_fraction))
    if not 1 <= train_count <= n_samples - 1:
        raise ConfigError(f"train_count {train_count} outside [1, {n_samples - 1}] for {n_samples} rows")
    return train_count


def split(matrix: SupervisedMatrix, train_count=None, train_fraction=None):
    """Chronological split: the first ``train_count`` rows train, the rest test."""
    n = resolve_train_count(matrix.n_samples, train_count, train_fraction)
    return matrix.replace(rows=slice(0, n)), matrix.replace(rows=slice(n, None))


def strided_subsample(matrix: SupervisedMatrix, cap: int) -> SupervisedMatrix:
    """Keep at most ``cap`` rows, evenly spaced in time."""
    if cap < 1:
        raise ConfigError(f"subsample cap must be >= 1, got {cap}")
    if matrix.n_samples <= cap:
        return matrix
    rows = np.floor(np.arange(cap) * (matrix.n_samples / cap)).astype(np.int64)
    return matrix.replace(rows=rows)

