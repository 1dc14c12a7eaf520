"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import os

import numpy as np
from sklearn.utils import check_array

from .core import ConformanceError, CurveSet, Grid


def make_grid(grid_points, d: int) -> Grid:
    """Grid for ``d`` columns: explicit points get trapezoidal weights, ``None``
    means the coordinate grid with unit weights."""
    if grid_points is None:
        return Grid.coordinates(d)
    if isinstance(grid_points, Grid):
        grid = grid_points
    else:
        grid = Grid(grid_points)
    if len(grid) != d:
        raise ConformanceError(f"data has {d} columns but the grid has {len(grid)} points")
    return grid


def check_curves(X, grid_points=None, *, grid: Grid | None = None) -> CurveSet:
    """Coerce ``X`` into a :class:`CurveSet`.

    ``X`` may already be a CurveSet (returned unchanged when it conforms to
    ``grid``) or anything :func:`sklearn.utils.check_array` accepts, with one
    curve per row.
    """
    if isinstance(X, CurveSet):
        if grid is not None and X.grid != grid:
            raise ConformanceError("curve set grid differs from the fitted grid")
        return X
    arr = check_array(X, dtype=np.float64, ensure_2d=True, ensure_all_finite=True)
    if grid is None:
        grid = make_grid(grid_points, arr.shape[1])
    elif arr.shape[1] != len(grid):
        raise ConformanceError(
            f"X has {arr.shape[1]} columns but the fitted grid has {len(grid)} points"
        )
    ids = None
    index = getattr(X, "index", None)
    if index is not None and len(index) == arr.shape[0]:
        ids = tuple(map(str, index))
    return CurveSet(grid, arr, ids)


def check_same_grid(*sets: CurveSet) -> Grid:
    grid = sets[0].grid
    for s in sets[1:]:
        if s.grid != grid:
            raise ConformanceError("all curve sets must share one grid")
    return grid


def n_workers() -> int:
    """Worker count from ``FEXTREM_THREADS`` (default 1)."""
    raw = os.environ.get("FEXTREM_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"FEXTREM_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"FEXTREM_THREADS must be a positive integer, got {raw!r}")
    return value
