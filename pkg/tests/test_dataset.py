import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowcast.dataset import (AREAL, CSV_COLUMNS, RAIN, MinMaxScaler, SyntheticConfig, TimeSeriesTable,
                              areal_rainfall, fit_scaler, format_timestamp, generate_synthetic, load_csv,
                              parse_timestamp, route_flow, save_csv, series_to_supervised, split,
                              strided_subsample, supervised_headings, with_areal)
from flowcast.errors import ConfigError, DataError, EmptyWindowError, ShapeError
from flowcast.numcore import make_rng

NAMES = CSV_COLUMNS[1:]


def make_table(n, seed=0, start=0, gaps=()):
    """Random table; ``gaps`` lists row indices preceded by a missing hour."""
    ts = start + np.arange(n) + np.searchsorted(np.array(sorted(gaps), dtype=int), np.arange(n), side="right")
    vals = make_rng(seed).random((n, len(NAMES))) * 10
    return TimeSeriesTable(ts, NAMES, vals)


def naive_windows(table, cols, enc, pred):
    """Row-by-row reference construction of the supervised matrix."""
    idx = [table.names.index(c) for c in cols]
    feats, targs = [], []
    for start, stop in table.segments():
        for t in range(start + enc, stop - pred + 1):
            row = []
            for lag in range(enc, 0, -1):
                row.extend(table.values[t - lag, idx])
            feats.append(row)
            targs.append(table.values[t + pred - 1, 0])
    return np.array(feats), np.array(targs)


# ---------------------------------------------------------------- table


def test_timestamp_round_trip():
    h = parse_timestamp("2000-01-01 05:00")
    assert format_timestamp(h) == "2000-01-01 05:00"
    assert parse_timestamp("17") == 17
    with pytest.raises(ValueError):
        parse_timestamp("2000-01-01 05:30")


def test_table_rejects_bad_values():
    with pytest.raises(DataError, match="strictly increasing"):
        TimeSeriesTable(np.array([0, 2, 1]), NAMES, np.ones((3, 12)))
    vals = np.ones((3, 12))
    vals[1, 3] = -1.0
    with pytest.raises(DataError, match="row 2, column P3"):
        TimeSeriesTable(np.arange(3), NAMES, vals)
    vals[1, 3] = np.nan
    with pytest.raises(DataError):
        TimeSeriesTable(np.arange(3), NAMES, vals)
    with pytest.raises(DataError):
        TimeSeriesTable(np.arange(3), ("P1",) + NAMES[1:], np.ones((3, 12)))


def test_segments_from_gaps():
    t = make_table(10, gaps=(4, 7))
    assert t.segment_breaks == (4, 7)
    assert t.segments() == [(0, 4), (4, 7), (7, 10)]


def test_areal_rainfall_uniform_and_weighted(small_table):
    rain = np.column_stack([small_table.column(p) for p in RAIN])
    assert np.allclose(areal_rainfall(small_table), rain.mean(axis=1), atol=1e-12)
    w = np.zeros(11)
    w[2] = 1.0
    assert np.array_equal(areal_rainfall(small_table, w), small_table.column("P3"))
    with pytest.raises(ConfigError):
        areal_rainfall(small_table, np.full(11, 0.2))
    with pytest.raises(ConfigError):
        areal_rainfall(small_table, np.full(10, 0.1))
    w[2], w[3] = 1.5, -0.5
    with pytest.raises(ConfigError):
        areal_rainfall(small_table, w)
    assert AREAL in with_areal(small_table).names


def test_csv_round_trip(tmp_path, small_table):
    path = tmp_path / "data.csv"
    save_csv(small_table, path)
    back = load_csv(path)
    assert np.array_equal(back.timestamps, small_table.timestamps)
    assert np.array_equal(back.values, small_table.values)


@pytest.mark.parametrize("body, message", [
    ("2000-01-01 00:00,1" + ",0" * 11 + "\n2000-01-01 01:00,-3" + ",0" * 11, "row 2, column Q"),
    ("2000-01-01 00:00,1" + ",0" * 10 + ",x", "row 1, column P11: non-numeric"),
    ("noon,1" + ",0" * 11, "row 1: unparseable timestamp"),
])
def test_csv_errors_name_row_and_column(tmp_path, body, message):
    path = tmp_path / "bad.csv"
    path.write_text(",".join(CSV_COLUMNS) + "\n" + body + "\n")
    with pytest.raises(DataError, match=message):
        load_csv(path)


def test_csv_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,Q\n2000-01-01 00:00,1\n")
    with pytest.raises(DataError, match="missing column"):
        load_csv(path)


# ---------------------------------------------------------------- windowing


def test_standard_layout_names():
    table = make_table(40)
    m = series_to_supervised(table, 12, 6)
    assert m.features.shape == (40 - 17, 144)
    assert m.target_name == "Q(t+5)"
    assert m.feature_names[:2] == ("Q(t-12)", "P1(t-12)")
    assert m.feature_names[-1] == "P11(t-1)"
    headings = supervised_headings(NAMES, 12, 6)
    assert len(headings) == 216
    assert headings[204] == "Q(t+5)"        # 205th column of the full transform


def test_windowing_matches_naive_construction_across_gaps():
    table = make_table(60, seed=4, gaps=(13, 40))
    for variables in (("flow",), ("flow", "rain"), ("rain",)):
        m = series_to_supervised(table, 4, 3, variables)
        cols = [c for c in NAMES if (c == "Q" and "flow" in variables) or (c != "Q" and "rain" in variables)]
        f, t = naive_windows(table, cols, 4, 3)
        assert np.array_equal(m.features, f)
        assert np.array_equal(m.targets, t)


def test_windowing_areal_column_appended(small_table):
    m = series_to_supervised(small_table, 3, 2, ("flow", "areal"))
    assert m.variables == ("Q", "A")
    assert m.features.shape[1] == 6
    assert np.allclose(m.features[0, 1], areal_rainfall(small_table)[0])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 80), st.integers(1, 15), st.integers(1, 15))
def test_row_count_law(length, enc, pred):
    table = make_table(length)
    expected = length - (enc + pred - 1)
    if expected <= 0:
        with pytest.raises(EmptyWindowError) as info:
            series_to_supervised(table, enc, pred)
        assert info.value.segment_lengths == (length,)
    else:
        m = series_to_supervised(table, enc, pred)
        assert m.n_samples == expected
        assert m.features.shape[1] == 12 * enc


def test_empty_selection_rejected():
    with pytest.raises(ConfigError):
        series_to_supervised(make_table(20), 2, 2, ())


def test_split_partition_and_fraction():
    m = series_to_supervised(make_table(27), 12, 6)      # 10 rows
    tr, te = split(m, train_fraction=0.7)
    assert (tr.n_samples, te.n_samples) == (7, 3)
    assert np.array_equal(np.vstack([tr.features, te.features]), m.features)
    assert tr.target_timestamps[-1] < te.target_timestamps[0]
    with pytest.raises(ConfigError):
        split(m, train_count=10)
    with pytest.raises(ConfigError):
        split(m, train_count=3, train_fraction=0.5)


def test_strided_subsample_keeps_order():
    m = series_to_supervised(make_table(200), 3, 1)
    s = strided_subsample(m, 50)
    assert s.n_samples == 50
    assert np.all(np.diff(s.target_timestamps) > 0)
    assert strided_subsample(m, 10_000) is m


# ---------------------------------------------------------------- scaling


def test_scaler_known_values():
    s = fit_scaler(np.array([[0.0, 5.0], [10.0, 5.0], [5.0, 5.0]]))
    assert np.allclose(s.transform([[5.0, 5.0]]), [[0.5, 0.0]])
    assert np.allclose(s.inverse_transform([[1.0, 0.0]]), [[10.0, 5.0]])
    with pytest.raises(ShapeError):
        s.transform(np.zeros((2, 3)))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.integers(1, 6), st.integers(0, 10_000))
def test_scaler_round_trip(rows, cols, seed):
    data = make_rng(seed).normal(0, 100, (rows, cols))
    s = fit_scaler(data)
    z = s.transform(data)
    assert np.all((z >= 0) & (z <= 1))
    assert np.allclose(s.inverse_transform(z), data, atol=1e-12 * np.abs(data).max() + 1e-12)


def test_scaler_persist(tmp_path):
    s = fit_scaler(make_rng(1).random((5, 3)), names=("a", "b", "c"))
    s.save(tmp_path / "s.csv")
    back = MinMaxScaler.load(tmp_path / "s.csv")
    assert back.names == s.names
    assert np.array_equal(back.mins, s.mins) and np.array_equal(back.maxs, s.maxs)


def test_scale_matrix_target_column(small_table):
    m = series_to_supervised(small_table, 3, 2)
    s = fit_scaler(m)
    scaled = s.scale_matrix(m)
    assert scaled.targets.min() == 0.0 and scaled.targets.max() == 1.0
    assert np.allclose(s.inverse_targets(scaled.targets), m.targets, rtol=0, atol=1e-12 * m.targets.max())


# ---------------------------------------------------------------- synthetic


def test_synthetic_deterministic_and_nonnegative():
    a = generate_synthetic(make_rng(9), 500)
    b = generate_synthetic(9, 500)
    assert np.array_equal(a.values, b.values)
    assert np.all(a.values >= 0)
    assert a.names == NAMES
    assert not np.array_equal(a.values, generate_synthetic(10, 500).values)


def test_route_flow_matches_reservoir_recursion():
    cfg = SyntheticConfig()
    rain = make_rng(2).random((50, 11))
    flow, storage = route_flow(rain, cfg, noise=np.zeros(50))
    s = cfg.initial_storage
    for t in range(50):
        assert abs(flow[t] - cfg.output_coeff * s) < 1e-9
        inflow = sum(w * rain[t - lag, j] for j, (w, lag) in enumerate(zip(cfg.weights, cfg.lags)) if t - lag >= 0)
        s = (1 - cfg.recession) * s + inflow


def test_synthetic_recession_is_slow():
    t = generate_synthetic(5, 4000)
    q = t.column("Q")
    dq = np.diff(q)
    # flashy rises, gentle falls: average rise much steeper than average fall
    assert dq[dq > 0].mean() > 3 * -dq[dq < 0].mean()
    assert np.mean(dq < 0) > 0.5


def test_synthetic_config_validation():
    with pytest.raises(ConfigError):
        generate_synthetic(1, 500, SyntheticConfig(recession=1.5))
    with pytest.raises(ConfigError):
        generate_synthetic(1, 10)
