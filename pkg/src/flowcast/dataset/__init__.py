"""Data ingestion, windowing, scaling and synthetic catchment generation."""

from .scaling import EPSILON_GUARD, MinMaxScaler, fit_scaler
from .synthetic import SyntheticConfig, generate_synthetic, route_flow, simulate_storms
from .table import (AREAL, CSV_COLUMNS, FLOW, N_STATIONS, RAIN, TimeSeriesTable, areal_rainfall,
                    format_timestamp, load_csv, parse_timestamp, save_csv, with_areal)
from .windowing import (VARIABLE_GROUPS, SupervisedMatrix, lag_label, resolve_train_count,
                        selected_columns, series_to_supervised, split, strided_subsample,
                        supervised_headings)

__all__ = [
    "AREAL", "CSV_COLUMNS", "EPSILON_GUARD", "FLOW", "N_STATIONS", "RAIN", "VARIABLE_GROUPS",
    "MinMaxScaler", "SupervisedMatrix", "SyntheticConfig", "TimeSeriesTable",
    "areal_rainfall", "fit_scaler", "format_timestamp", "generate_synthetic", "lag_label",
    "load_csv", "parse_timestamp", "resolve_train_count", "route_flow", "save_csv",
    "selected_columns", "series_to_supervised", "simulate_storms", "split",
    "strided_subsample", "supervised_headings", "with_areal",
]
