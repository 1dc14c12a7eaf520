"""Grids, curve samples and the pointwise comparison primitives.

A curve sample is held as an ``(n, d)`` float array aligned to a shared
:class:`Grid`. Individual :class:`Curve` objects are only materialised on
demand; every kernel works on the array.
"""

from __future__ import annotations

import enum
from functools import cached_property
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ConformanceError",
    "Curve",
    "CurveSet",
    "ExtremalityKind",
    "Grid",
    "fraction_below",
    "pointwise_below",
    "trapezoid_weights",
]


class ConformanceError(ValueError):
    """A curve does not conform to the grid it is evaluated on."""


class ExtremalityKind(enum.Enum):
    HYPER = "hyper"
    HYPO = "hypo"
    GEN_HYPER = "gen-hyper"
    GEN_HYPO = "gen-hypo"

    @property
    def generalized(self) -> bool:
        return self in (ExtremalityKind.GEN_HYPER, ExtremalityKind.GEN_HYPO)

    @property
    def mirrored(self) -> ExtremalityKind:
        """The kind that scores the opposite side of the sample."""
        return _MIRROR[self]

    @classmethod
    def parse(cls, value: str | ExtremalityKind) -> ExtremalityKind:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(
            f"unknown extremality kind {value!r}; expected one of "
            + ", ".join(k.value for k in cls)
        )


_MIRROR = {
    ExtremalityKind.HYPER: ExtremalityKind.HYPO,
    ExtremalityKind.HYPO: ExtremalityKind.HYPER,
    ExtremalityKind.GEN_HYPER: ExtremalityKind.GEN_HYPO,
    ExtremalityKind.GEN_HYPO: ExtremalityKind.GEN_HYPER,
}


def trapezoid_weights(points: np.ndarray) -> np.ndarray:
    """Trapezoidal cell lengths of an ordered grid.

    A single point gets weight 1 so that proportions stay defined.
    """
    points = np.asarray(points, dtype=float)
    d = points.size
    if d == 1:
        return np.ones(1)
    w = np.empty(d)
    w[0] = (points[1] - points[0]) / 2
    w[-1] = (points[-1] - points[-2]) / 2
    w[1:-1] = (points[2:] - points[:-2]) / 2
    return w


@dataclass(frozen=True, eq=False)
class Grid:
    """Evaluation points of the common domain plus integration weights.

    Parameters
    ----------
    points : array_like
        Strictly increasing, finite evaluation points.
    weights : array_like, optional
        Nonnegative weights. Defaults to the trapezoidal cell lengths, which
        sum to the length of the domain.
    """

    points: np.ndarray
    weights: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        points = np.array(self.points, dtype=float).ravel()
        if points.size < 1:
            raise ValueError("grid needs at least one point")
        if not np.all(np.isfinite(points)):
            raise ValueError("grid points must be finite")
        bad = np.flatnonzero(np.diff(points) <= 0)
        if bad.size:
            raise ValueError(
                f"grid points must be strictly increasing (violated at position {bad[0] + 2})"
            )
        if self.weights is None:
            weights = trapezoid_weights(points)
        else:
            weights = np.array(self.weights, dtype=float).ravel()
            if weights.shape != points.shape:
                raise ValueError("grid weights must match grid points in length")
            if not np.all(np.isfinite(weights)) or np.any(weights < 0):
                raise ValueError("grid weights must be finite and nonnegative")
        if not weights.sum() > 0:
            raise ValueError("grid weights must have positive total mass")
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def coordinates(cls, d: int) -> Grid:
        """Index grid ``1..d`` with unit weights (counting measure).

        This is the finite-dimensional reading of a curve: proportions over
        this grid are plain coordinate counts divided by ``d``.
        """
        if d < 1:
            raise ValueError("grid needs at least one point")
        return cls(np.arange(1, d + 1, dtype=float), np.ones(d))

    @classmethod
    def uniform(cls, start: float, stop: float, d: int) -> Grid:
        """Equally spaced grid on ``[start, stop]`` with trapezoidal weights."""
        return cls(np.linspace(start, stop, d))

    def __len__(self) -> int:
        return self.points.size

    @cached_property
    def measure(self) -> float:
        """Total weight, the discrete length of the domain.

        Summed in the same order as the masses, so a curve that is below
        on every grid point gets a fraction of exactly 1.
        """
        return _weighted_mass(np.ones(self.points.size, dtype=bool), self.weights)

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return np.array_equal(self.points, other.points) and np.array_equal(
            self.weights, other.weights
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class Curve:
    id: str
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise ConformanceError(f"curve {str(self.id)!r} has non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "id", str(self.id))

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, Curve):
            return NotImplemented
        return self.id == other.id and np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore[assignment]


def _check_conforms(values: np.ndarray, grid: Grid, curve_id: str) -> np.ndarray:
    # finiteness is checked once, when a Curve or CurveSet is built
    if values.size != grid.points.size:
        raise ConformanceError(
            f"curve {curve_id!r} has {values.size} values but the grid has {len(grid)} points"
        )
    return values


@dataclass(frozen=True, eq=False)
class CurveSet:
    """``n`` curves sampled on one grid.

    Parameters
    ----------
    grid : Grid
    values : array_like of shape (n, d)
    ids : sequence of str, optional
        Unique labels; defaults to ``"0"``, ``"1"``, ...
    """

    grid: Grid
    values: np.ndarray
    ids: tuple = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if values.ndim != 2:
            raise ConformanceError("curve values must form a 2-D array")
        n, d = values.shape
        if n < 1:
            raise ConformanceError("a curve set needs at least one curve")
        ids = tuple(str(i) for i in range(n)) if self.ids is None else tuple(map(str, self.ids))
        if len(ids) != n:
            raise ConformanceError(f"{len(ids)} ids given for {n} curves")
        if len(set(ids)) != n:
            seen = set()
            dup = next(i for i in ids if i in seen or seen.add(i))
            raise ConformanceError(f"duplicate curve id {dup!r}")
        if d != len(self.grid):
            raise ConformanceError(
                f"curve {ids[0]!r} has {d} values but the grid has {len(self.grid)} points"
            )
        finite = np.isfinite(values).all(axis=1)
        if not finite.all():
            bad = ids[int(np.flatnonzero(~finite)[0])]
            raise ConformanceError(f"curve {bad!r} has non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "ids", ids)

    @classmethod
    def from_curves(cls, grid: Grid, curves: Iterable[Curve]) -> CurveSet:
        curves = list(curves)
        if not curves:
            raise ConformanceError("a curve set needs at least one curve")
        rows = [_check_conforms(c.values, grid, c.id) for c in curves]
        return cls(grid, np.vstack(rows), tuple(c.id for c in curves))

    def __len__(self) -> int:
        return self.values.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i: int) -> Curve:
        return Curve(self.ids[i], self.values[i])

    @property
    def curves(self) -> list[Curve]:
        return list(self)

    def subset(self, index: Sequence[int]) -> CurveSet:
        index = np.asarray(index, dtype=int)
        return CurveSet(self.grid, self.values[index], tuple(self.ids[i] for i in index))

    def map_values(self, values: np.ndarray) -> CurveSet:
        """Same grid and ids, new values."""
        return CurveSet(self.grid, values, self.ids)

    def __eq__(self, other):
        if not isinstance(other, CurveSet):
            return NotImplemented
        return (
            self.grid == other.grid
            and self.ids == other.ids
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


def pointwise_below(a: Curve, b: Curve, grid: Grid) -> bool:
    """True iff ``a(t) <= b(t)`` at every grid point (ties count)."""
    av = _check_conforms(a.values, grid, a.id)
    bv = _check_conforms(b.values, grid, b.id)
    return bool((av <= bv).all())


def _weighted_mass(mask: np.ndarray, weights: np.ndarray) -> float:
    # Plain left-to-right float additions; the batched kernel accumulates in
    # the same order so both give bit-identical sums.
    mass = 0.0
    for w in weights[mask].tolist():
        mass += w
    return mass


def fraction_below(a: Curve, b: Curve, grid: Grid) -> float:
    """Weighted proportion of the grid where ``a(t) <= b(t)``."""
    av = _check_conforms(a.values, grid, a.id)
    bv = _check_conforms(b.values, grid, b.id)
    return _weighted_mass(av <= bv, grid.weights) / grid.measure
