import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fextrem import (
    ConformanceError,
    Curve,
    CurveSet,
    ExtremalityKind,
    Grid,
    batch_extremality,
    gen_hyperextremality,
    gen_hypoextremality,
    hyperextremality,
    hypoextremality,
    naive_extremality,
    score_curves,
)
from fextrem.measures import _PAIR_BUDGET

from .conftest import random_curve_set

KINDS = list(ExtremalityKind)
SINGLE = {
    ExtremalityKind.HYPER: hyperextremality,
    ExtremalityKind.HYPO: hypoextremality,
    ExtremalityKind.GEN_HYPER: gen_hyperextremality,
    ExtremalityKind.GEN_HYPO: gen_hypoextremality,
}


def constants(levels, d=4):
    return CurveSet(Grid.coordinates(d), np.repeat(np.asarray(levels, float)[:, None], d, axis=1))


def const_query(c, d=4):
    return Curve("q", np.full(d, float(c)))


class TestHyper:
    def test_constant_levels(self):
        assert hyperextremality(constants([1, 2, 3]), const_query(2.5)) == pytest.approx(1 / 3)

    def test_query_below_everything(self):
        assert hyperextremality(constants([1, 2, 3]), const_query(0)) == 1.0

    def test_five_curves(self, five_curves):
        sample, q = five_curves
        assert hyperextremality(sample, Curve("x", q)) == 0.8

    def test_conformance(self):
        with pytest.raises(ConformanceError):
            hyperextremality(constants([1, 2]), Curve("q", [1.0, 2.0]))


class TestHypo:
    def test_five_curves(self, five_curves):
        sample, q = five_curves
        assert hypoextremality(sample, Curve("x", q)) == 0.6

    def test_query_above_everything(self):
        assert hypoextremality(constants([1, 2, 3]), const_query(1e300)) == 1.0

    def test_singleton_member(self):
        s = constants([7.0])
        assert hypoextremality(s, s[0]) == 0.0


class TestGeneralized:
    def test_parallel_example(self, parallel_example):
        sample, q = parallel_example
        assert gen_hyperextremality(sample, Curve("x0", q)) == pytest.approx(4 / 9, abs=1e-15)
        assert gen_hypoextremality(sample, Curve("x0", q)) == pytest.approx(5 / 9, abs=1e-15)

    def test_parallel_example_strict_measures(self, parallel_example):
        # only x1 is fully below, only x3 fully above
        sample, q = parallel_example
        assert hyperextremality(sample, Curve("x0", q)) == pytest.approx(2 / 3)
        assert hypoextremality(sample, Curve("x0", q)) == pytest.approx(2 / 3)

    @pytest.mark.parametrize("fn", [gen_hyperextremality, gen_hypoextremality])
    def test_singleton(self, fn):
        s = CurveSet(Grid.uniform(0, 1, 5), [[0.3, 0.1, 0.2, 0.5, 0.0]])
        assert fn(s, s[0]) == 0.0

    def test_strictly_below_and_above(self, rng):
        s = random_curve_set(rng, 8, 6)
        low = Curve("low", s.values.min(axis=0) - 1)
        high = Curve("high", s.values.max(axis=0) + 1)
        assert gen_hyperextremality(s, low) == 1.0
        assert gen_hypoextremality(s, high) == 1.0


class TestBatch:
    def test_constant_levels(self):
        report = batch_extremality(constants([1, 2, 3]), "hyper")
        np.testing.assert_allclose(report.scores, [2 / 3, 1 / 3, 0.0])
        assert report.ids == ("0", "1", "2")
        assert report.values[0][0] == "0"

    @pytest.mark.parametrize("kind", KINDS)
    def test_singleton(self, kind):
        assert batch_extremality(constants([4.0]), kind).scores.tolist() == [0.0]

    @pytest.mark.parametrize("kind", KINDS)
    def test_matches_naive_loop_20x15(self, kind, rng):
        s = random_curve_set(rng, 20, 15)
        np.testing.assert_array_equal(batch_extremality(s, kind).scores, naive_extremality(s, kind).scores)

    @pytest.mark.parametrize("kind", KINDS)
    def test_matches_single_query(self, kind, rng):
        s = random_curve_set(rng, 12, 7, ties=True)
        batch = batch_extremality(s, kind).scores
        single = [SINGLE[kind](s, c) for c in s]
        np.testing.assert_array_equal(batch, single)

    @pytest.mark.parametrize("kind", KINDS)
    def test_chunked_kernel(self, kind, rng, monkeypatch):
        s = random_curve_set(rng, 30, 9, ties=True)
        expected = batch_extremality(s, kind).scores
        monkeypatch.setattr("fextrem.measures._PAIR_BUDGET", 7)
        np.testing.assert_array_equal(batch_extremality(s, kind).scores, expected)
        assert _PAIR_BUDGET > 7

    @pytest.mark.parametrize("kind", KINDS)
    def test_threads_do_not_change_output(self, kind, rng, monkeypatch):
        s = random_curve_set(rng, 25, 11, ties=True)
        expected = batch_extremality(s, kind).scores
        monkeypatch.setenv("FEXTREM_THREADS", "3")
        np.testing.assert_array_equal(batch_extremality(s, kind).scores, expected)

    def test_bad_thread_env(self, monkeypatch):
        monkeypatch.setenv("FEXTREM_THREADS", "zero")
        with pytest.raises(ValueError, match="FEXTREM_THREADS"):
            batch_extremality(constants([1.0, 2.0]), "hyper")

    def test_external_queries_not_added(self):
        s = constants([1, 2, 3])
        got = score_curves(s, np.full((2, 4), 2.0), "hyper")
        np.testing.assert_allclose(got, [1 / 3, 1 / 3])


# --- properties -----------------------------------------------------------

sets = st.tuples(st.integers(1, 8), st.integers(1, 6)).flatmap(
    lambda nd: st.tuples(
        arrays(np.float64, nd, elements=st.integers(-4, 4).map(float)),
        arrays(np.float64, nd[1], elements=st.integers(-4, 4).map(float)),
        arrays(np.float64, nd[1], elements=st.integers(0, 3).map(float)),
    )
)


def _make(values):
    return CurveSet(Grid.coordinates(values.shape[1]), values)


@settings(max_examples=150, deadline=None)
@given(sets)
def test_report_range_and_granularity(data):
    values, _, _ = data
    s = _make(values)
    n = len(s)
    for kind in KINDS:
        scores = batch_extremality(s, kind).scores
        assert np.all((scores >= 0) & (scores <= 1 - 1 / n + 1e-12))
        if not kind.generalized:
            np.testing.assert_allclose(scores * n, np.round(scores * n), atol=1e-9)


@settings(max_examples=150, deadline=None)
@given(sets)
def test_monotone_in_pointwise_order(data):
    values, x, bump = data
    s = _make(values)
    lo, hi = Curve("x", x), Curve("y", x + bump)
    for fn in (hyperextremality, gen_hyperextremality):
        assert fn(s, hi) <= fn(s, lo)
    for fn in (hypoextremality, gen_hypoextremality):
        assert fn(s, lo) <= fn(s, hi)


@settings(max_examples=150, deadline=None)
@given(sets)
def test_generalized_bounded_by_strict(data):
    values, x, _ = data
    s, q = _make(values), Curve("q", x)
    assert gen_hyperextremality(s, q) <= hyperextremality(s, q) + 1e-12
    assert gen_hypoextremality(s, q) <= hypoextremality(s, q) + 1e-12


@settings(max_examples=150, deadline=None)
@given(sets)
def test_complement_laws(data):
    values, x, _ = data
    s, q = _make(values), Curve("q", x)
    total = gen_hyperextremality(s, q) + gen_hypoextremality(s, q)
    assert total <= 1 + 1e-12
    if not np.any(values == x):
        assert total == pytest.approx(1.0, abs=1e-12)
    if not np.any(np.all(values == x, axis=1)):
        assert hyperextremality(s, q) + hypoextremality(s, q) >= 1


@settings(max_examples=100, deadline=None)
@given(sets, st.randoms(use_true_random=False))
def test_sample_permutation_invariance(data, rnd):
    values, x, _ = data
    perm = list(range(values.shape[0]))
    rnd.shuffle(perm)
    s1, s2, q = _make(values), _make(values[perm]), Curve("q", x)
    for fn in SINGLE.values():
        assert fn(s1, q) == pytest.approx(fn(s2, q), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(sets)
def test_far_queries(data):
    values, _, _ = data
    s = _make(values)
    assert hyperextremality(s, Curve("lo", values.min(axis=0) - 1)) == 1.0
    assert hypoextremality(s, Curve("hi", values.max(axis=0) + 1)) == 1.0
