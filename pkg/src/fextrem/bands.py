"""Central regions from the extremality ordering, plus Monte Carlo checks.

:func:`central_region` trims the most hyper-extreme and the most
hypo-extreme curves of a sample and returns the envelope of what is left.
:func:`simulate_consistency` measures how fast sample hyperextremality
approaches its population value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_curves, n_workers
from .core import Curve, CurveSet, ExtremalityKind, Grid
from .measures import score_curves

__all__ = [
    "PROCESSES",
    "CentralRegion",
    "CentralRegionTrimmer",
    "SimulationSummary",
    "central_region",
    "far_curve_probe",
    "simulate_consistency",
]

PROCESSES = ("uniform-constant", "brownian-like-random-walk")
DEFAULT_LEVELS = tuple(round(0.1 * i, 1) for i in range(1, 10))


@dataclass(frozen=True)
class CentralRegion:
    grid: Grid
    kept: tuple
    trimmed_high: tuple
    trimmed_low: tuple
    envelope_min: Curve
    envelope_max: Curve
    hyper_kind: ExtremalityKind
    hypo_kind: ExtremalityKind
    hyper_scores: np.ndarray
    hypo_scores: np.ndarray

    def role(self, curve_id: str) -> str:
        if curve_id in self.trimmed_high:
            return "trimmed-high"
        if curve_id in self.trimmed_low:
            return "trimmed-low"
        return "kept"


def _trim_count(alpha: float, n: int) -> int:
    # guard against alpha * n landing a hair above an integer (0.7 * 10)
    return min(n, math.ceil(alpha * n - 1e-9))


def central_region(sample: CurveSet, hyper_kind="hyper", hypo_kind="hypo", alpha_hyper=0.1, alpha_hypo=0.1) -> CentralRegion:
    """Trim the ``ceil(alpha_hyper * n)`` curves with the highest hyper-kind
    score and the ``ceil(alpha_hypo * n)`` with the highest hypo-kind score.

    Both selections run over the whole sample. A curve picked by both is
    removed once and reported as trimmed-high. Ties are broken by the higher
    opposite-side score, then by id.
    """
    hyper_kind = ExtremalityKind.parse(hyper_kind)
    hypo_kind = ExtremalityKind.parse(hypo_kind)
    if hyper_kind not in (ExtremalityKind.HYPER, ExtremalityKind.GEN_HYPER):
        raise ValueError(f"hyper_kind must be hyper or gen-hyper, got {hyper_kind.value}")
    if hypo_kind not in (ExtremalityKind.HYPO, ExtremalityKind.GEN_HYPO):
        raise ValueError(f"hypo_kind must be hypo or gen-hypo, got {hypo_kind.value}")
    if not (alpha_hyper >= 0 and alpha_hypo >= 0 and alpha_hyper + alpha_hypo < 1):
        raise ValueError(
            f"need alpha_hyper, alpha_hypo >= 0 with sum < 1, got {alpha_hyper}, {alpha_hypo}"
        )
    n = len(sample)
    hi = score_curves(sample, sample, hyper_kind)
    lo = score_curves(sample, sample, hypo_kind)
    ids = sample.ids
    by_high = sorted(range(n), key=lambda i: (-hi[i], -lo[i], ids[i]))
    by_low = sorted(range(n), key=lambda i: (-lo[i], -hi[i], ids[i]))
    high = set(by_high[: _trim_count(alpha_hyper, n)])
    low = set(by_low[: _trim_count(alpha_hypo, n)]) - high
    kept = [i for i in range(n) if i not in high and i not in low]
    if not kept:
        raise ValueError("trimming leaves no curves in the central region")
    kept_values = sample.values[kept]
    return CentralRegion(
        grid=sample.grid,
        kept=tuple(ids[i] for i in kept),
        trimmed_high=tuple(ids[i] for i in sorted(high)),
        trimmed_low=tuple(ids[i] for i in sorted(low)),
        envelope_min=Curve("envelope_min", kept_values.min(axis=0)),
        envelope_max=Curve("envelope_max", kept_values.max(axis=0)),
        hyper_kind=hyper_kind,
        hypo_kind=hypo_kind,
        hyper_scores=hi,
        hypo_scores=lo,
    )


def far_curve_probe(sample: CurveSet, offset: float, generalized: bool = False) -> tuple[float, float]:
    """Scores of curves pushed ``offset`` beyond the sample's pointwise range.

    Returns the hyper-side score of ``min(sample) - offset`` and the
    hypo-side score of ``max(sample) + offset``; both are 1 for any
    ``offset > 0`` that survives rounding.
    """
    if not offset > 0:
        raise ValueError("offset must be positive")
    below = sample.values.min(axis=0) - offset
    above = sample.values.max(axis=0) + offset
    if generalized:
        kinds = ExtremalityKind.GEN_HYPER, ExtremalityKind.GEN_HYPO
    else:
        kinds = ExtremalityKind.HYPER, ExtremalityKind.HYPO
    h = score_curves(sample, below.reshape(1, -1), kinds[0])[0]
    l = score_curves(sample, above.reshape(1, -1), kinds[1])[0]
    return float(h), float(l)


@dataclass(frozen=True)
class SimulationSummary:
    """Monte Carlo distance between sample and population hyperextremality.

    Attributes
    ----------
    process : str
    n_values : tuple of int
        Strictly increasing sample sizes.
    levels : tuple of float
        Constant query levels ``c``.
    errors : ndarray of shape (len(n_values),)
        Mean absolute error over replications and levels.
    errors_by_level : ndarray of shape (len(n_values), len(levels))
        Mean absolute error over replications.
    replicate_errors : ndarray of shape (len(n_values), reps)
        Mean absolute error over levels, per replication. Column ``r`` uses
        nested prefixes of one sample path, so columns are paired.
    population : ndarray of shape (len(levels),)
        Population hyperextremality of each query.
    reps : int
    seed : int
    """

    process: str
    n_values: tuple
    levels: tuple
    errors: np.ndarray
    errors_by_level: np.ndarray
    replicate_errors: np.ndarray
    population: np.ndarray
    reps: int
    seed: int


def _draw(process: str, rng: np.random.Generator, n: int, grid_size: int) -> np.ndarray:
    if process == "uniform-constant":
        z = rng.uniform(0.0, 1.0, size=n)
        return np.repeat(z[:, None], grid_size, axis=1)
    steps = rng.normal(0.0, 1.0 / math.sqrt(grid_size), size=(n, grid_size))
    return np.cumsum(steps, axis=1)


def _population(process, levels, grid_size, seed, population_size):
    if process == "uniform-constant":
        return 1.0 - np.asarray(levels)
    # no closed form on a discrete walk: large independent sample as a proxy
    rng = np.random.default_rng([seed, 1])
    peaks = np.empty(0)
    for start in range(0, population_size, 50_000):
        size = min(50_000, population_size - start)
        peaks = np.concatenate([peaks, _draw(process, rng, size, grid_size).max(axis=1)])
    return np.array([1.0 - np.mean(peaks <= c) for c in levels])


def simulate_consistency(
    process: str = "uniform-constant",
    n_list=(10, 100, 1000, 10000),
    grid_size: int = 10,
    reps: int = 100,
    seed: int = 0,
    levels=DEFAULT_LEVELS,
    population_size: int = 200_000,
) -> SimulationSummary:
    """Mean |HEM_n(c) - HEM(c)| for constant queries ``c`` as ``n`` grows.

    ``uniform-constant`` draws flat curves at a Uniform(0, 1) level, whose
    population hyperextremality at level ``c`` is ``1 - c``. The random walk
    has Gaussian steps of variance ``1/grid_size``; its population value is
    estimated from ``population_size`` independent paths.

    Replication ``r`` draws one path of ``max(n_list)`` curves from its own
    substream of ``seed`` and scores every prefix, so the result does not
    depend on how replications are scheduled.
    """
    if process not in PROCESSES:
        raise ValueError(f"unknown process {process!r}; expected one of {', '.join(PROCESSES)}")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    n_values = tuple(int(n) for n in n_list)
    if not n_values or n_values[0] < 1 or any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n_list must be strictly increasing positive sizes")
    if grid_size < 1:
        raise ValueError("grid_size must be at least 1")
    levels = tuple(float(c) for c in levels)
    grid = Grid.uniform(0.0, 1.0, grid_size) if grid_size > 1 else Grid([0.0])
    queries = np.repeat(np.asarray(levels)[:, None], grid_size, axis=1)
    truth = _population(process, levels, grid_size, seed, population_size)
    streams = np.random.SeedSequence(seed).spawn(reps)

    def one(child):
        rng = np.random.default_rng(child)
        paths = _draw(process, rng, n_values[-1], grid_size)
        out = np.empty((len(n_values), len(levels)))
        for a, n in enumerate(n_values):
            sample = CurveSet(grid, paths[:n])
            out[a] = np.abs(score_curves(sample, queries, ExtremalityKind.HYPER) - truth)
        return out

    workers = min(n_workers(), reps)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_rep = list(pool.map(one, streams))
    else:
        per_rep = [one(s) for s in streams]
    abs_err = np.stack(per_rep, axis=1)  # (n_values, reps, levels)
    return SimulationSummary(
        process=process,
        n_values=n_values,
        levels=levels,
        errors=abs_err.mean(axis=(1, 2)),
        errors_by_level=abs_err.mean(axis=1),
        replicate_errors=abs_err.mean(axis=2),
        population=truth,
        reps=reps,
        seed=seed,
    )


class CentralRegionTrimmer(OutlierMixin, BaseEstimator):
    """Flag the most extreme curves and build the band of the rest.

    Parameters
    ----------
    alpha_hyper, alpha_hypo : float, default=0.1
        Fractions trimmed on each side.
    generalized : bool, default=False
        Rank by the generalized (proportion-of-grid) measures.
    grid_points : array_like, optional

    Attributes
    ----------
    region_ : CentralRegion
    labels_ : ndarray of shape (n_samples,)
        1 for kept curves, -1 for trimmed ones.
    """

    def __init__(self, alpha_hyper=0.1, alpha_hypo=0.1, generalized=False, grid_points=None):
        self.alpha_hyper = alpha_hyper
        self.alpha_hypo = alpha_hypo
        self.generalized = generalized
        self.grid_points = grid_points

    def fit(self, X, y=None):
        sample = check_curves(X, self.grid_points)
        if self.generalized:
            kinds = ExtremalityKind.GEN_HYPER, ExtremalityKind.GEN_HYPO
        else:
            kinds = ExtremalityKind.HYPER, ExtremalityKind.HYPO
        self.region_ = central_region(sample, kinds[0], kinds[1], self.alpha_hyper, self.alpha_hypo)
        kept = set(self.region_.kept)
        self.labels_ = np.array([1 if i in kept else -1 for i in sample.ids])
        self.n_features_in_ = sample.values.shape[1]
        return self

    def predict(self, X):
        """1 for curves inside the fitted band at every grid point, else -1."""
        check_is_fitted(self, "region_")
        values = check_curves(X, grid=self.region_.grid).values
        inside = (values >= self.region_.envelope_min.values) & (values <= self.region_.envelope_max.values)
        return np.where(inside.all(axis=1), 1, -1)

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_
