import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowcast.errors import ShapeError, UndefinedMetricError
from flowcast.metrics import (PREDICTED_MEAN, PUBLISHED_COMPARISON, PUBLISHED_INPUT_STUDY, EvalReport, evaluate,
                              mae, r2, rmse)

from oracles import mae_naive, r2_naive, rmse_naive

vectors = st.integers(2, 40).flatmap(
    lambda n: st.tuples(st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n),
                        st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n)))


def test_known_values():
    p, o = np.array([1.0, 2.0, 3.0]), np.array([1.0, 2.0, 5.0])
    assert rmse(p, o) == pytest.approx(np.sqrt(4 / 3), abs=1e-15)
    assert mae(p, o) == pytest.approx(2 / 3, abs=1e-15)
    assert r2(p, o) == pytest.approx(1 - 4 / (25 / 9 + 4 / 9 + 49 / 9), abs=1e-15)
    assert r2(o, o) == 1.0
    assert r2(np.full(3, o.mean()), o) == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=100)
@given(vectors)
def test_against_naive_sums(pair):
    p, o = map(np.array, pair)
    assert abs(rmse(p, o) - rmse_naive(p, o)) <= 1e-10 * max(1.0, rmse_naive(p, o))
    assert abs(mae(p, o) - mae_naive(p, o)) <= 1e-10 * max(1.0, mae_naive(p, o))
    assert rmse(p, o) >= mae(p, o) * (1 - 1e-12)
    if np.ptp(o) > 1e-3:
        ref = r2_naive(p, o, o)
        assert abs(r2(p, o) - ref) <= 1e-10 * max(1.0, abs(ref))


@settings(max_examples=50)
@given(vectors, st.floats(0.01, 100), st.floats(-50, 50))
def test_r2_affine_invariance(pair, a, b):
    p, o = map(np.array, pair)
    if np.ptp(o) < 1e-3:
        return
    assert abs(r2(a * p + b, a * o + b) - r2(p, o)) <= 1e-10 * max(1.0, abs(r2(p, o)))


def test_predicted_mean_convention():
    p, o = np.array([1.0, 2.0, 4.0]), np.array([1.5, 2.0, 3.0])
    assert r2(p, o, PREDICTED_MEAN) == pytest.approx(r2_naive(p, o, p), abs=1e-14)
    with pytest.raises(ValueError):
        r2(p, o, "median")


def test_undefined_and_shape_errors():
    with pytest.raises(UndefinedMetricError):
        r2(np.array([1.0, 2.0]), np.array([3.0, 3.0]))
    with pytest.raises(UndefinedMetricError):
        r2(np.array([1.0, 1.0]), np.array([3.0, 4.0]), PREDICTED_MEAN)
    with pytest.raises(ShapeError):
        rmse(np.zeros(3), np.zeros(4))
    with pytest.raises(ShapeError):
        mae(np.zeros(0), np.zeros(0))


def test_eval_report_serialisation():
    rep = evaluate(np.array([1.0, 2.0, 3.5]), np.array([1.0, 2.5, 3.0]), "demo")
    assert rep.n == 3
    assert json.loads(rep.to_json())["run_id"] == "demo"
    assert rep.to_csv_row().split(",")[0] == "demo"
    assert EvalReport.csv_header() == "run_id,n,rmse,mae,r2"


def test_reference_tables_are_exact():
    assert PUBLISHED_COMPARISON == {
        "svr": {"rmse": 136.022, "mae": 63.939, "r2": 0.917},
        "mlp": {"rmse": 99.359, "mae": 35.248, "r2": 0.956},
        "lstm": {"rmse": 82.007, "mae": 27.752, "r2": 0.970},
    }
    assert len(PUBLISHED_INPUT_STUDY) == 7
    assert PUBLISHED_INPUT_STUDY[("flow", "rain")] == PUBLISHED_COMPARISON["lstm"]
    assert ("no_flow", "none") not in PUBLISHED_INPUT_STUDY


@settings(max_examples=50)
@given(vectors, st.floats(0.01, 100))
def test_symmetry_and_scaling(pair, k):
    p, o = map(np.array, pair)
    assert rmse(p, o) == rmse(o, p) and mae(p, o) == mae(o, p)
    assert abs(rmse(k * p, k * o) - k * rmse(p, o)) <= 1e-9 * max(1.0, k * rmse(p, o))
    assert abs(mae(k * p, k * o) - k * mae(p, o)) <= 1e-9 * max(1.0, k * mae(p, o))
