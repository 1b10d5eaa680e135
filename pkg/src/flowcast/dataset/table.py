"""Hourly flow/rain tables and their CSV representation."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DataError

FLOW = "Q"
N_STATIONS = 11
RAIN = tuple(f"P{j}" for j in range(1, N_STATIONS + 1))
AREAL = "A"
CSV_COLUMNS = ("timestamp", FLOW) + RAIN

_EPOCH = datetime(1970, 1, 1)
_TS_FORMAT = "%Y-%m-%d %H:%M"


def parse_timestamp(text: str) -> int:
    """Parse ``YYYY-MM-DD HH:00`` or an integer count of hours since 1970-01-01."""
    text = text.strip()
    if text.lstrip("-").isdigit():
        return int(text)
    dt = datetime.strptime(text, _TS_FORMAT)
    if dt.minute != 0:
        raise ValueError(f"timestamp {text!r} is not on the hour")
    return int((dt - _EPOCH).total_seconds()) // 3600


def format_timestamp(hours: int) -> str:
    return (_EPOCH + timedelta(hours=int(hours))).strftime(_TS_FORMAT)


@dataclass(frozen=True)
class TimeSeriesTable:
    """Timestamped hourly series; column 0 is flow Q, then stations P1..P11.

    ``values`` has one row per timestamp. An optional areal-rainfall column
    ``A`` may follow the station columns.
    """

    timestamps: np.ndarray
    names: tuple
    values: np.ndarray
    segment_breaks: tuple = field(init=False)

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.float64)
        names = tuple(self.names)
        if vals.ndim != 2 or vals.shape[1] != len(names):
            raise DataError(f"values shape {vals.shape} does not match {len(names)} column names")
        if ts.ndim != 1 or len(ts) != vals.shape[0]:
            raise DataError(f"{len(ts)} timestamps for {vals.shape[0]} rows")
        if len(ts) and names[0] != FLOW:
            raise DataError(f"column 0 must be {FLOW!r}, got {names[0]!r}")
        steps = np.diff(ts)
        if np.any(steps <= 0):
            i = int(np.argmax(steps <= 0)) + 1
            raise DataError(f"timestamps not strictly increasing at row {i + 1}")
        bad = ~np.isfinite(vals) | (vals < 0)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise DataError(f"row {r + 1}, column {names[c]}: value {vals[r, c]} must be finite and >= 0")
        ts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "segment_breaks", tuple(int(i) + 1 for i in np.flatnonzero(steps > 1)))

    def __len__(self):
        return len(self.timestamps)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.values[:, self.names.index(name)]
        except ValueError:
            raise DataError(f"table has no column {name!r}") from None

    def segments(self) -> list[tuple[int, int]]:
        """Half-open ``(start, stop)`` row ranges of gap-free hourly runs."""
        bounds = (0,) + self.segment_breaks + (len(self),)
        return [(bounds[k], bounds[k + 1]) for k in range(len(bounds) - 1)]

    def with_column(self, name: str, data) -> "TimeSeriesTable":
        if name in self.names:
            raise DataError(f"column {name!r} already present")
        data = np.asarray(data, dtype=np.float64).reshape(-1, 1)
        return TimeSeriesTable(self.timestamps, self.names + (name,), np.hstack([self.values, data]))


def areal_rainfall(table: TimeSeriesTable, weights=None) -> np.ndarray:
    """Weighted mean of the eleven station series at each hour (uniform by default)."""
    if weights is None:
        weights = np.full(N_STATIONS, 1.0 / N_STATIONS)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (N_STATIONS,):
        raise ConfigError(f"expected {N_STATIONS} station weights, got {weights.size}")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ConfigError("station weights must be finite and non-negative")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise ConfigError(f"station weights must sum to 1, got {weights.sum()}")
    rain = np.column_stack([table.column(p) for p in RAIN])
    return rain @ weights


def with_areal(table: TimeSeriesTable, weights=None) -> TimeSeriesTable:
    if AREAL in table.names:
        return table
    return table.with_column(AREAL, areal_rainfall(table, weights))


def load_csv(path) -> TimeSeriesTable:
    """Read a ``timestamp,Q,P1,...,P11`` file; row numbers in errors count data rows from 1."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
        idx = [header.index(c) for c in CSV_COLUMNS]
        stamps, rows = [], []
        for rowno, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < len(header):
                raise DataError(f"{path}: row {rowno} has {len(row)} fields, expected {len(header)}")
            try:
                stamps.append(parse_timestamp(row[idx[0]]))
            except ValueError:
                raise DataError(f"{path}: row {rowno}: unparseable timestamp {row[idx[0]]!r}") from None
            vals = []
            for name, i in zip(CSV_COLUMNS[1:], idx[1:]):
                try:
                    x = float(row[i])
                except ValueError:
                    raise DataError(f"{path}: row {rowno}, column {name}: non-numeric value {row[i]!r}") from None
                if not np.isfinite(x) or x < 0:
                    raise DataError(f"{path}: row {rowno}, column {name}: value {x} must be finite and >= 0")
                vals.append(x)
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return TimeSeriesTable(np.array(stamps), CSV_COLUMNS[1:], np.array(rows))


def save_csv(table: TimeSeriesTable, path) -> None:
    """Write the station schema (extra derived columns are not persisted)."""
    cols = [table.names.index(c) for c in CSV_COLUMNS[1:]]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for t, row in zip(table.timestamps, table.values[:, cols]):
            w.writerow([format_timestamp(t)] + [repr(float(x)) for x in row])
