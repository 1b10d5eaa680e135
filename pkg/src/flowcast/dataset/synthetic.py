"""Synthetic catchment: stochastic storms over 11 gauges routed through a linear reservoir.

Storage evolves as S[t+1] = (1 - k) S[t] + sum_j w_j P_j[t - lag_j] and the
gauge reads Q[t] = c S[t] (1 + eta[t]) with small Gaussian noise eta. Storms
arrive abruptly and drain slowly, which gives flashy flood peaks with long
recessions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..numcore import Rng, make_rng
from .table import CSV_COLUMNS, N_STATIONS, TimeSeriesTable, parse_timestamp


def _default_weights():
    w = np.array([1.4, 0.8, 1.1, 0.6, 1.3, 0.9, 1.0, 0.7, 1.2, 0.5, 1.5])
    return tuple(w / w.sum())


@dataclass(frozen=True)
class SyntheticConfig:
    recession: float = 0.06              # k, fraction of storage released per hour
    output_coeff: float = 8.0            # c, storage -> m3/s
    weights: tuple = field(default_factory=_default_weights)
    lags: tuple = (2, 3, 3, 4, 4, 5, 5, 6, 7, 8, 9)
    storm_rate: float = 0.012            # storm onsets per hour
    duration: tuple = (3, 24)            # inclusive range, hours
    mean_intensity: float = 4.0          # mm/h at storm peak, catchment average
    coverage: float = 0.85               # probability a gauge sees a given storm
    station_spread: float = 0.5          # lognormal sigma of per-gauge storm depth
    noise_sd: float = 0.02
    initial_storage: float = 5.0
    start: str = "2000-01-01 00:00"

    def validate(self):
        if not 0.0 < self.recession < 1.0:
            raise ConfigError(f"recession coefficient must lie in (0, 1), got {self.recession}")
        if len(self.weights) != N_STATIONS or len(self.lags) != N_STATIONS:
            raise ConfigError(f"need {N_STATIONS} weights and lags")
        if any(w < 0 for w in self.weights) or any(int(l) != l or l < 0 for l in self.lags):
            raise ConfigError("weights must be >= 0 and lags non-negative integers")
        if self.output_coeff <= 0 or self.noise_sd < 0 or self.initial_storage < 0:
            raise ConfigError("output_coeff must be > 0; noise_sd and initial_storage >= 0")
        if not 0.0 <= self.storm_rate <= 1.0 or not 0.0 <= self.coverage <= 1.0:
            raise ConfigError("storm_rate and coverage are probabilities")
        lo, hi = self.duration
        if not 1 <= lo <= hi:
            raise ConfigError(f"invalid storm duration range {self.duration}")


def simulate_storms(rng: Rng, n_hours: int, config: SyntheticConfig) -> np.ndarray:
    """Hourly rain depths, shape ``(n_hours, 11)``."""
    rain = np.zeros((n_hours, N_STATIONS))
    onsets = np.flatnonzero(rng.random(n_hours) < config.storm_rate)
    lo, hi = config.duration
    for t0 in onsets:
        dur = int(rng.integers(lo, hi + 1))
        peak = rng.gamma(2.0, config.mean_intensity / 2.0)
        # asymmetric triangle: fast build-up, longer tail
        rise = max(1, dur // 3)
        shape = np.concatenate([np.linspace(0.3, 1.0, rise), np.linspace(1.0, 0.1, dur - rise + 1)[1:]])
        hourly = peak * shape * rng.gamma(4.0, 0.25, size=dur)
        gauges = (rng.random(N_STATIONS) < config.coverage) * rng.lognormal(0.0, config.station_spread, N_STATIONS)
        stop = min(n_hours, t0 + dur)
        rain[t0:stop] += np.outer(hourly[: stop - t0], gauges)
    return rain


def route_flow(rain: np.ndarray, config: SyntheticConfig, noise=None) -> tuple[np.ndarray, np.ndarray]:
    """Run the reservoir recursion; returns ``(flow, storage)``.

    ``noise`` holds the multiplicative perturbation per hour (zeros if omitted).
    """
    n = rain.shape[0]
    w = np.asarray(config.weights, dtype=np.float64)
    lags = np.asarray(config.lags, dtype=np.int64)
    inflow = np.zeros(n)
    for j in range(N_STATIONS):
        inflow[lags[j]:] += w[j] * rain[: n - lags[j], j]
    storage = np.empty(n)
    storage[0] = config.initial_storage
    keep = 1.0 - config.recession
    for t in range(n - 1):
        storage[t + 1] = keep * storage[t] + inflow[t]
    factor = 1.0 if noise is None else np.maximum(1.0 + noise, 0.0)
    return config.output_coeff * storage * factor, storage


def generate_synthetic(rng, n_hours: int, config: SyntheticConfig | None = None) -> TimeSeriesTable:
    """Seeded synthetic table with the same schema as a gauge CSV.

    ``rng`` may be a generator or an integer seed.
    """
    config = config or SyntheticConfig()
    config.validate()
    if n_hours < 100:
        raise ConfigError(f"n_hours must be >= 100, got {n_hours}")
    if not isinstance(rng, np.random.Generator):
        rng = make_rng(int(rng))
    rain = simulate_storms(rng, n_hours, config)
    noise = rng.normal(0.0, config.noise_sd, n_hours) if config.noise_sd > 0 else None
    flow, _ = route_flow(rain, config, noise)
    start = parse_timestamp(config.start)
    return TimeSeriesTable(start + np.arange(n_hours), CSV_COLUMNS[1:], np.column_stack([flow, rain]))
