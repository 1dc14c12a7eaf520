import numpy as np
import pytest

from fextrem import CurveSet, Grid

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, text = marker.args
        _criteria[number] = (report.outcome, text)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        outcome, text = _criteria[number]
        status = {"passed": "PASS", "skipped": "SKIP"}.get(outcome, "FAIL")
        terminalreporter.write_line(f"AC{number:<3} {status}  {text}")


def random_curve_set(rng, n, d, ties=False, grid=None):
    """Random curves; with ``ties`` the values sit on a coarse integer
    lattice and some curves are duplicated so equalities are common."""
    if ties:
        values = rng.integers(0, 4, size=(n, d)).astype(float)
        if n > 1:
            dup = rng.integers(0, n, size=max(1, n // 5))
            values[dup] = values[rng.integers(0, n)]
    else:
        values = rng.normal(size=(n, d))
    if grid is None:
        if rng.random() < 0.5:
            grid = Grid.coordinates(d)
        else:
            grid = Grid(np.cumsum(rng.uniform(0.1, 1.0, size=d)))
    return CurveSet(grid, values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def parallel_example():
    """Three points in R^3 and the query from the parallel-coordinates example."""
    grid = Grid.coordinates(3)
    sample = CurveSet(grid, [[2, 1, 1], [4, 3, 2], [6, 5, 5]], ids=["x1", "x2", "x3"])
    return sample, np.array([4.5, 2.0, 4.0])


@pytest.fixture
def five_curves():
    """Five curves on [0, 0.6]; exactly one lies fully below the query
    ``q(t) = sin(5t)`` and two lie fully above it."""
    grid = Grid.uniform(0.0, 0.6, 13)
    t = grid.points
    q = np.sin(5 * t)
    values = [
        q - 0.5,  # fully below
        q + 0.4,  # fully above
        q + 0.2 + 0.1 * t,  # fully above
        q + np.cos(9 * t),  # crosses
        q - 0.3 + t,  # crosses
    ]
    return CurveSet(grid, values, ids=list("abcde")), q
