"""Hyper/hypo extremality of curves and their generalized versions.

For a sample ``x_1..x_n`` and a query ``x``:

* hyperextremality is one minus the share of sample curves lying entirely
  on or below ``x``;
* hypoextremality is one minus the share lying entirely on or above ``x``;
* the generalized versions replace "entirely" by the weighted proportion of
  the grid on which the relation holds.

Large values mean extreme. All comparisons are exact ``<=`` on the raw
floats.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_curves, n_workers
from .core import (
    Curve,
    CurveSet,
    ExtremalityKind,
    _check_conforms,
    fraction_below,
    pointwise_below,
)

__all__ = [
    "ExtremalityMeasure",
    "ExtremalityReport",
    "batch_extremality",
    "gen_hyperextremality",
    "gen_hypoextremality",
    "hyperextremality",
    "hypoextremality",
    "naive_extremality",
    "score_curves",
]

_PAIR_BUDGET = 1 << 20


@dataclass(frozen=True)
class ExtremalityReport:
    kind: ExtremalityKind
    ids: tuple
    scores: np.ndarray

    @property
    def values(self) -> list[tuple[str, float]]:
        return [(i, float(s)) for i, s in zip(self.ids, self.scores)]

    def __len__(self) -> int:
        return len(self.ids)


def _below_counts(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """For each row ``b`` of ``B``: number of rows of ``A`` with ``a <= b`` everywhere.

    Scans grid columns one at a time over the still-alive (a, b) pairs, so a
    pair is dropped at its first violated coordinate.
    """
    n, d = A.shape
    m = B.shape[0]
    counts = np.zeros(m, dtype=np.int64)
    chunk = max(1, _PAIR_BUDGET // n)
    for start in range(0, m, chunk):
        Bc = B[start : start + chunk]
        ai = np.repeat(np.arange(n), Bc.shape[0])
        bj = np.tile(np.arange(Bc.shape[0]), n)
        for k in range(d):
            keep = A[ai, k] <= Bc[bj, k]
            ai = ai[keep]
            bj = bj[keep]
            if ai.size == 0:
                break
        counts[start : start + Bc.shape[0]] = np.bincount(bj, minlength=Bc.shape[0])
    return counts


def _below_mass(A: np.ndarray, B: np.ndarray, weights: np.ndarray, total: float) -> np.ndarray:
    """For each row ``b`` of ``B``: sum over rows ``a`` of the weighted
    proportion of the grid where ``a <= b``.

    The accumulation order (grid left to right, then sample rows in order)
    matches :func:`fextrem.core.fraction_below` summed in a plain loop.
    """
    n, d = A.shape
    m = B.shape[0]
    out = np.zeros(m)
    chunk = max(1, _PAIR_BUDGET // n)
    for start in range(0, m, chunk):
        Bc = B[start : start + chunk]
        mass = np.zeros((n, Bc.shape[0]))
        for k in range(d):
            mass += np.where(A[:, k, None] <= Bc[None, :, k], weights[k], 0.0)
        fractions = mass / total
        out[start : start + Bc.shape[0]] = np.add.accumulate(fractions, axis=0)[-1]
    return out


def _scores(sample: CurveSet, Q: np.ndarray, kind: ExtremalityKind) -> np.ndarray:
    X = sample.values
    n = X.shape[0]
    if kind in (ExtremalityKind.HYPO, ExtremalityKind.GEN_HYPO):
        # q <= x  <=>  -x <= -q
        X, Q = -X, -Q
    if kind.generalized:
        grid = sample.grid
        return 1.0 - _below_mass(X, Q, grid.weights, grid.measure) / n
    return 1.0 - _below_counts(X, Q) / n


def score_curves(sample: CurveSet, queries, kind) -> np.ndarray:
    """Extremality of every query curve with respect to ``sample``.

    Parameters
    ----------
    sample : CurveSet
        The sample defining the empirical distribution.
    queries : CurveSet or array_like of shape (m, d)
        Curves on the sample's grid; they are not added to the sample.
    kind : ExtremalityKind or str

    Returns
    -------
    ndarray of shape (m,)
    """
    kind = ExtremalityKind.parse(kind)
    Q = check_curves(queries, grid=sample.grid).values
    workers = min(n_workers(), Q.shape[0])
    if workers <= 1:
        return _scores(sample, Q, kind)
    parts = np.array_split(np.arange(Q.shape[0]), workers)
    out = np.empty(Q.shape[0])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = pool.map(lambda idx: _scores(sample, Q[idx], kind), parts)
        for idx, res in zip(parts, results):
            out[idx] = res
    return out


def _single(sample: CurveSet, query: Curve, kind: ExtremalityKind) -> float:
    q = _check_conforms(query.values, sample.grid, query.id)
    return float(_scores(sample, q.reshape(1, -1), kind)[0])


def hyperextremality(sample: CurveSet, query: Curve) -> float:
    """One minus the share of sample curves entirely on or below ``query``."""
    return _single(sample, query, ExtremalityKind.HYPER)


def hypoextremality(sample: CurveSet, query: Curve) -> float:
    """One minus the share of sample curves entirely on or above ``query``."""
    return _single(sample, query, ExtremalityKind.HYPO)


def gen_hyperextremality(sample: CurveSet, query: Curve) -> float:
    """One minus the mean proportion of the grid where sample curves are on or below ``query``."""
    return _single(sample, query, ExtremalityKind.GEN_HYPER)


def gen_hypoextremality(sample: CurveSet, query: Curve) -> float:
    return _single(sample, query, ExtremalityKind.GEN_HYPO)


def batch_extremality(sample: CurveSet, kind) -> ExtremalityReport:
    """Score every member of ``sample`` against the whole sample, itself included."""
    kind = ExtremalityKind.parse(kind)
    return ExtremalityReport(kind, sample.ids, score_curves(sample, sample, kind))


def naive_extremality(sample: CurveSet, kind) -> ExtremalityReport:
    """Reference double loop over :func:`pointwise_below` / :func:`fraction_below`.

    Kept as the oracle for :func:`batch_extremality`; quadratic in Python.
    """
    kind = ExtremalityKind.parse(kind)
    grid = sample.grid
    curves = sample.curves
    n = len(curves)
    scores = np.empty(n)
    for j, q in enumerate(curves):
        if kind is ExtremalityKind.HYPER:
            scores[j] = 1 - sum(pointwise_below(x, q, grid) for x in curves) / n
        elif kind is ExtremalityKind.HYPO:
            scores[j] = 1 - sum(pointwise_below(q, x, grid) for x in curves) / n
        else:
            total = 0.0
            for x in curves:
                if kind is ExtremalityKind.GEN_HYPER:
                    total += fraction_below(x, q, grid)
                else:
                    total += fraction_below(q, x, grid)
            scores[j] = 1 - total / n
    return ExtremalityReport(kind, sample.ids, scores)


class ExtremalityMeasure(TransformerMixin, BaseEstimator):
    """Extremality of curves with respect to a fitted reference sample.

    Parameters
    ----------
    kind : {"hyper", "hypo", "gen-hyper", "gen-hypo"}, default="hyper"
    grid_points : array_like, optional
        Evaluation points of the columns of ``X``. When omitted the columns
        are treated as coordinates with unit weights.

    Attributes
    ----------
    reference_ : CurveSet
        The fitted sample.
    n_features_in_ : int
    """

    def __init__(self, kind="hyper", grid_points=None):
        self.kind = kind
        self.grid_points = grid_points

    def fit(self, X, y=None):
        self.kind_ = ExtremalityKind.parse(self.kind)
        self.reference_ = check_curves(X, self.grid_points)
        self.n_features_in_ = self.reference_.values.shape[1]
        return self

    def score_samples(self, X):
        """Extremality of each row of ``X``; higher is more extreme."""
        check_is_fitted(self, "reference_")
        return score_curves(self.reference_, check_curves(X, grid=self.reference_.grid), self.kind_)

    def transform(self, X):
        return self.score_samples(X).reshape(-1, 1)

    def fit_transform(self, X, y=None, **fit_params):
        # members are scored against the sample they belong to, self included
        return self.fit(X).transform(self.reference_)
