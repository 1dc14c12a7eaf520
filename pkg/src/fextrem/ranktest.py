"""Two-sample rank test for curves built on extremality.

Each curve of the two samples is reduced to its R score: the proportion of
reference curves at least as extreme as it is. Small R means extreme. The
pooled R scores are ranked and ``W`` is the sum of the ranks of the second
sample; under the null those ranks are ``m`` draws without replacement from
``1..n+m``, and the null is rejected for small ``W``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_curves, check_same_grid
from .core import CurveSet, ExtremalityKind
from .measures import score_curves

__all__ = [
    "AUTO_EXACT_MAX",
    "EXACT_LIMIT",
    "FunctionalRankTest",
    "NullDistribution",
    "RScore",
    "RankAssignment",
    "RankTestResult",
    "assign_ranks",
    "exact_null",
    "exact_p_value",
    "normal_p_value",
    "r_scores",
    "rank_test",
    "w_statistic",
]

EXACT_LIMIT = 1024
AUTO_EXACT_MAX = 64
ALTERNATIVES = ("less", "two-sided")
METHODS = ("exact", "normal", "auto")


@dataclass(frozen=True)
class RScore:
    id: str
    em: float
    r: float


@dataclass(frozen=True)
class RankEntry:
    id: str
    label: str
    index: int
    r: float
    rank: int


@dataclass(frozen=True)
class RankAssignment:
    entries: tuple

    def ranks(self, label: str) -> np.ndarray:
        return np.array([e.rank for e in self.entries if e.label == label], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class NullDistribution:
    """Law of the sum of ``m`` ranks drawn without replacement from ``1..n+m``."""

    n: int
    m: int
    support: np.ndarray
    probabilities: np.ndarray

    @property
    def pmf(self) -> dict[int, float]:
        return {int(w): float(p) for w, p in zip(self.support, self.probabilities)}

    def cdf(self, w: float) -> float:
        """P(W <= w)."""
        return float(min(1.0, self.probabilities[self.support <= w].sum()))

    def sf(self, w: float) -> float:
        """P(W >= w)."""
        return float(min(1.0, self.probabilities[self.support >= w].sum()))


@dataclass(frozen=True)
class RankTestResult:
    w: int
    p_value: float
    method: str
    alternative: str
    kind: ExtremalityKind
    assignment: RankAssignment
    n: int
    m: int
    n0: int
    x_scores: tuple = field(repr=False, default=())
    y_scores: tuple = field(repr=False, default=())


def _validate_reference(reference: CurveSet, *samples: CurveSet) -> None:
    check_same_grid(reference, *samples)


def r_scores(reference: CurveSet, sample: CurveSet, kind) -> list[RScore]:
    """R score of each curve of ``sample`` relative to ``reference``.

    The reference members are scored against the reference itself (self
    included); ``r`` is the share of them whose extremality is ``>=`` the
    query's.
    """
    kind = ExtremalityKind.parse(kind)
    _validate_reference(reference, sample)
    ref_em = score_curves(reference, reference, kind)
    em = score_curves(reference, sample, kind)
    return _r_from_em(ref_em, em, sample.ids)


def _r_from_em(ref_em: np.ndarray, em: np.ndarray, ids) -> list[RScore]:
    ordered = np.sort(ref_em)
    # number of reference scores >= em
    at_least = ordered.size - np.searchsorted(ordered, em, side="left")
    r = at_least / ordered.size
    return [RScore(i, float(e), float(v)) for i, e, v in zip(ids, em, r)]


def assign_ranks(x_scores, y_scores, tie_policy="paper-order", seed=None) -> RankAssignment:
    """Rank the pooled R scores from smallest to largest.

    Parameters
    ----------
    x_scores, y_scores : sequence of RScore
    tie_policy : {"paper-order", "random"}
        ``"paper-order"`` gives tied entries consecutive ranks with the first
        sample before the second and original order within a sample.
        ``"random"`` permutes every tie group with a generator seeded by
        ``seed``.
    seed : int or numpy Generator, optional
        Required for ``"random"``.
    """
    pooled = [("X", i, s) for i, s in enumerate(x_scores)]
    pooled += [("Y", i, s) for i, s in enumerate(y_scores)]
    if not pooled:
        raise ValueError("nothing to rank")
    pooled.sort(key=lambda e: (e[2].r, e[0], e[1]))
    if tie_policy == "random":
        if seed is None:
            raise ValueError("the random tie policy needs a seed")
        rng = np.random.default_rng(seed)
        start = 0
        while start < len(pooled):
            stop = start + 1
            while stop < len(pooled) and pooled[stop][2].r == pooled[start][2].r:
                stop += 1
            if stop - start > 1:
                group = pooled[start:stop]
                pooled[start:stop] = [group[i] for i in rng.permutation(len(group))]
            start = stop
    elif tie_policy != "paper-order":
        raise ValueError(f"unknown tie policy {tie_policy!r}")
    entries = tuple(
        RankEntry(s.id, label, idx, s.r, rank)
        for rank, (label, idx, s) in enumerate(pooled, start=1)
    )
    return RankAssignment(entries)


def w_statistic(assignment: RankAssignment) -> int:
    """Sum of the ranks held by the second sample."""
    return int(sum(e.rank for e in assignment.entries if e.label == "Y"))


def exact_null(n: int, m: int, limit: int = EXACT_LIMIT) -> NullDistribution:
    """Exact law of ``W`` for sample sizes ``n`` (first) and ``m`` (second).

    Uses the Gaussian-binomial recurrence on ``U = W - m(m+1)/2``: after step
    ``i`` the coefficients count the ``i``-subsets of ``1..max(n, m) + i`` by
    sum.
    Counts are rescaled each step to stay in floating range, and each step
    is re-symmetrised from its lower half, which keeps every probability
    accurate to a few ulps relative.
    """
    n, m = int(n), int(m)
    if n < 1 or m < 1:
        raise ValueError("sample sizes must be at least 1")
    if n + m > limit:
        raise ValueError(
            f"exact null for n+m={n + m} exceeds the limit of {limit} ranks; "
            "use the normal method"
        )
    k = min(n, m)
    other = n + m - k
    # U counts for k-subsets of 1..n+m; symmetric in (n, m)
    freqs = np.zeros(k * other + 1)
    freqs[0] = 1.0
    top = 0
    for i in range(1, k + 1):
        # multiply by (1 - q^(other+i)) then divide by (1 - q^i)
        new_top = top + other
        shift = other + i
        buf = np.zeros(new_top + 1)
        buf[: top + 1] = freqs[: top + 1]
        if shift <= new_top:
            buf[shift:] -= freqs[: new_top + 1 - shift]
        for r in range(i):
            buf[r::i] = np.cumsum(buf[r::i])
        # the upper half loses all relative accuracy to cancellation; the
        # lower half does not, and the law is symmetric
        half = new_top // 2
        buf[new_top - half :] = buf[: half + 1][::-1]
        np.maximum(buf, 0.0, out=buf)
        buf /= buf.max()
        freqs[: new_top + 1] = buf
        top = new_top
    probabilities = freqs / freqs.sum()
    support = np.arange(k * other + 1, dtype=np.int64) + m * (m + 1) // 2
    return NullDistribution(n, m, support, probabilities)


def exact_p_value(w: float, n: int, m: int, alternative: str = "less", limit: int = EXACT_LIMIT) -> float:
    null = exact_null(n, m, limit)
    if alternative == "less":
        return null.cdf(w)
    if alternative == "two-sided":
        return min(1.0, 2 * min(null.cdf(w), null.sf(w)))
    raise ValueError(f"unknown alternative {alternative!r}")


def normal_p_value(w: float, n: int, m: int, alternative: str = "less") -> float:
    """Normal approximation to the rank-sum tail with continuity correction."""
    if n < 1 or m < 1:
        raise ValueError("sample sizes must be at least 1")
    mean = m * (n + m + 1) / 2
    sd = math.sqrt(n * m * (n + m + 1) / 12)
    lower = float(ndtr((w + 0.5 - mean) / sd))
    if alternative == "less":
        return lower
    if alternative == "two-sided":
        upper = float(ndtr(-(w - 0.5 - mean) / sd))
        return min(1.0, 2 * min(lower, upper))
    raise ValueError(f"unknown alternative {alternative!r}")


def rank_test(
    sample_x: CurveSet,
    sample_y: CurveSet,
    reference: CurveSet,
    kind="hyper",
    method: str = "auto",
    tie_policy: str = "paper-order",
    alternative: str = "less",
    seed=None,
) -> RankTestResult:
    """Test whether ``sample_x`` and ``sample_y`` come from one population.

    ``reference`` should be a third sample from one of the two populations
    and larger than both; a smaller one only triggers a warning.
    ``method="auto"`` uses the exact null up to ``n + m = 64`` and the normal
    approximation beyond.
    """
    kind = ExtremalityKind.parse(kind)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if alternative not in ALTERNATIVES:
        raise ValueError(f"unknown alternative {alternative!r}")
    for name, s in (("sample_x", sample_x), ("sample_y", sample_y), ("reference", reference)):
        if s is None or len(s) == 0:
            raise ValueError(f"{name} is empty")
    _validate_reference(reference, sample_x, sample_y)
    n, m, n0 = len(sample_x), len(sample_y), len(reference)
    if n0 <= max(n, m):
        warnings.warn(
            f"reference size {n0} is not larger than both samples ({n}, {m})",
            stacklevel=2,
        )
    ref_em = score_curves(reference, reference, kind)
    xs = _r_from_em(ref_em, score_curves(reference, sample_x, kind), sample_x.ids)
    ys = _r_from_em(ref_em, score_curves(reference, sample_y, kind), sample_y.ids)
    assignment = assign_ranks(xs, ys, tie_policy, seed)
    w = w_statistic(assignment)
    if method == "auto":
        method = "exact" if n + m <= AUTO_EXACT_MAX else "normal"
    if method == "exact":
        p = exact_p_value(w, n, m, alternative)
    else:
        p = normal_p_value(w, n, m, alternative)
    return RankTestResult(
        w=w,
        p_value=p,
        method=method,
        alternative=alternative,
        kind=kind,
        assignment=assignment,
        n=n,
        m=m,
        n0=n0,
        x_scores=tuple(xs),
        y_scores=tuple(ys),
    )


class FunctionalRankTest(BaseEstimator):
    """Rank test against a fitted reference sample.

    ``fit`` stores the reference; ``test(X, Y)`` runs the two-sample test.

    Parameters
    ----------
    kind : {"hyper", "hypo", "gen-hyper", "gen-hypo"}, default="hyper"
    method : {"auto", "exact", "normal"}, default="auto"
    tie_policy : {"paper-order", "random"}, default="paper-order"
    alternative : {"less", "two-sided"}, default="less"
    random_state : int, optional
        Seed for the random tie policy.
    grid_points : array_like, optional
    """

    def __init__(
        self,
        kind="hyper",
        method="auto",
        tie_policy="paper-order",
        alternative="less",
        random_state=None,
        grid_points=None,
    ):
        self.kind = kind
        self.method = method
        self.tie_policy = tie_policy
        self.alternative = alternative
        self.random_state = random_state
        self.grid_points = grid_points

    def fit(self, X, y=None):
        self.reference_ = check_curves(X, self.grid_points)
        self.reference_scores_ = score_curves(self.reference_, self.reference_, self.kind)
        self.n_features_in_ = self.reference_.values.shape[1]
        return self

    def test(self, X, Y) -> RankTestResult:
        check_is_fitted(self, "reference_")
        grid = self.reference_.grid
        self.result_ = rank_test(
            check_curves(X, grid=grid),
            check_curves(Y, grid=grid),
            self.reference_,
            kind=self.kind,
            method=self.method,
            tie_policy=self.tie_policy,
            alternative=self.alternative,
            seed=self.random_state,
        )
        return self.result_

    def r_scores(self, X) -> np.ndarray:
        check_is_fitted(self, "reference_")
        X = check_curves(X, grid=self.reference_.grid)
        em = score_curves(self.reference_, X, self.kind)
        return np.array([s.r for s in _r_from_em(self.reference_scores_, em, X.ids)])
