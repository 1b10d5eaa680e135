import numpy as np
import pytest

from flowcast.dataset import generate_synthetic
from flowcast.numcore import make_rng


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture(scope="session")
def small_table():
    return generate_synthetic(make_rng(3), 600)


def assert_close(a, b, tol):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    assert a.shape == b.shape
    assert np.max(np.abs(a - b), initial=0.0) <= tol


_CRITERIA = {}


def record_criterion(number, passed, detail):
    _CRITERIA[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
