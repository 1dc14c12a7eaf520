import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fextrem import ConformanceError, Curve, CurveSet, ExtremalityKind, Grid, fraction_below, pointwise_below


def curve(values, name="c"):
    return Curve(name, values)


class TestGrid:
    def test_trapezoid_weights_by_hand(self):
        grid = Grid([0.0, 1.0, 3.0])
        np.testing.assert_array_equal(grid.weights, [0.5, 1.5, 1.0])
        assert grid.measure == 3.0

    def test_uniform_weights_sum_to_length(self):
        grid = Grid.uniform(-2.0, 5.0, 71)
        assert abs(grid.weights.sum() - 7.0) <= 1e-9 * 7.0

    def test_single_point_has_unit_weight(self):
        grid = Grid([0.3])
        np.testing.assert_array_equal(grid.weights, [1.0])

    def test_coordinate_grid(self):
        grid = Grid.coordinates(4)
        np.testing.assert_array_equal(grid.points, [1, 2, 3, 4])
        np.testing.assert_array_equal(grid.weights, [1, 1, 1, 1])

    @pytest.mark.parametrize("points", [[0.0, 0.0], [1.0, 0.5], [0.0, np.nan], []])
    def test_rejects_bad_points(self, points):
        with pytest.raises(ValueError):
            Grid(points)

    def test_rejects_negative_weights(self):
        with pytest.raises(ValueError):
            Grid([0.0, 1.0], [1.0, -1.0])

    def test_immutable(self):
        grid = Grid([0.0, 1.0])
        with pytest.raises(ValueError):
            grid.points[0] = 5.0


class TestCurveSet:
    def test_rejects_duplicate_ids(self):
        with pytest.raises(ConformanceError, match="duplicate"):
            CurveSet(Grid.coordinates(2), [[1, 2], [3, 4]], ids=["a", "a"])

    def test_rejects_wrong_width(self):
        with pytest.raises(ConformanceError):
            CurveSet(Grid.coordinates(3), [[1, 2]])

    def test_rejects_nan(self):
        with pytest.raises(ConformanceError, match="non-finite"):
            CurveSet(Grid.coordinates(2), [[1, np.nan]], ids=["bad"])

    def test_curve_rejects_inf(self):
        with pytest.raises(ConformanceError, match="'q' has non-finite"):
            Curve("q", [0.0, np.inf])

    def test_from_curves_names_offender(self):
        grid = Grid.coordinates(3)
        with pytest.raises(ConformanceError, match="'short'"):
            CurveSet.from_curves(grid, [Curve("ok", [1, 2, 3]), Curve("short", [1, 2])])

    def test_iteration_and_subset(self):
        s = CurveSet(Grid.coordinates(2), [[1, 2], [3, 4], [5, 6]], ids=["a", "b", "c"])
        assert [c.id for c in s] == ["a", "b", "c"]
        sub = s.subset([2, 0])
        assert sub.ids == ("c", "a")
        np.testing.assert_array_equal(sub.values, [[5, 6], [1, 2]])


class TestKind:
    @pytest.mark.parametrize("flag", ["hyper", "hypo", "gen-hyper", "gen-hypo"])
    def test_flags_round_trip(self, flag):
        assert ExtremalityKind.parse(flag).value == flag

    def test_unknown(self):
        with pytest.raises(ValueError):
            ExtremalityKind.parse("depth")

    def test_mirror_is_involution(self):
        for kind in ExtremalityKind:
            assert kind.mirrored.mirrored is kind
            assert kind.mirrored.generalized == kind.generalized


class TestPointwiseBelow:
    grid = Grid.coordinates(3)

    def test_strict_dominance(self):
        assert pointwise_below(curve([1, 1, 1]), curve([2, 2, 2]), self.grid)

    def test_parallel_example_pairs(self):
        q = curve([4.5, 2, 4])
        assert pointwise_below(curve([2, 1, 1]), q, self.grid)
        assert not pointwise_below(curve([4, 3, 2]), q, self.grid)

    def test_reflexive(self):
        a = curve([3, -1, 2])
        assert pointwise_below(a, a, self.grid)

    def test_length_mismatch_names_curve(self):
        with pytest.raises(ConformanceError, match="'bad'"):
            pointwise_below(Curve("bad", [1, 2]), curve([1, 2, 3]), self.grid)


class TestFractionBelow:
    def test_parallel_example(self):
        got = fraction_below(curve([4, 3, 2]), curve([4.5, 2, 4]), Grid.coordinates(3))
        assert got == pytest.approx(2 / 3, abs=1e-15)

    def test_equal_curves(self):
        a = curve([0.1, 0.2, 0.3])
        assert fraction_below(a, a, Grid.uniform(0, 1, 3)) == 1.0

    def test_trapezoid_weighted(self):
        # weights (0.5, 1.5, 1.0); a <= b only at t = 3
        grid = Grid([0.0, 1.0, 3.0])
        got = fraction_below(curve([5, 5, 0]), curve([1, 1, 1]), grid)
        assert got == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_conformance(self):
        with pytest.raises(ConformanceError):
            fraction_below(curve([1, 2]), curve([1, 2, 3]), Grid.coordinates(3))


pair = st.integers(1, 12).flatmap(
    lambda d: st.tuples(
        arrays(np.float64, d, elements=st.integers(-3, 3).map(float)),
        arrays(np.float64, d, elements=st.integers(-3, 3).map(float)),
        arrays(np.float64, d, elements=st.floats(0.01, 5.0)),
    )
)


@settings(max_examples=200, deadline=None)
@given(pair)
def test_mutual_below_iff_equal(data):
    a, b, _ = data
    grid = Grid.coordinates(a.size)
    both = pointwise_below(curve(a), curve(b), grid) and pointwise_below(curve(b), curve(a), grid)
    assert both == bool(np.array_equal(a, b))


@settings(max_examples=200, deadline=None)
@given(pair)
def test_fractions_cover_grid(data):
    a, b, w = data
    grid = Grid(np.arange(a.size, dtype=float), w)
    total = fraction_below(curve(a), curve(b), grid) + fraction_below(curve(b), curve(a), grid)
    assert total >= 1 - 1e-12
    if not np.any(a == b):
        assert total == pytest.approx(1.0, abs=1e-12)
    else:
        assert total > 1


@settings(max_examples=200, deadline=None)
@given(pair)
def test_fraction_is_one_iff_pointwise(data):
    a, b, w = data
    grid = Grid(np.arange(a.size, dtype=float), w)
    frac = fraction_below(curve(a), curve(b), grid)
    assert 0.0 <= frac <= 1.0 + 1e-15
    if pointwise_below(curve(a), curve(b), grid):
        assert frac == pytest.approx(1.0, abs=1e-12)
    else:
        assert frac < 1.0 - 1e-12


@settings(max_examples=100, deadline=None)
@given(pair, st.randoms(use_true_random=False))
def test_fraction_permutation_invariant(data, rnd):
    a, b, w = data
    perm = list(range(a.size))
    rnd.shuffle(perm)
    g1 = Grid(np.arange(a.size, dtype=float), w)
    g2 = Grid(np.arange(a.size, dtype=float), w[perm])
    f1 = fraction_below(curve(a), curve(b), g1)
    f2 = fraction_below(curve(a[perm]), curve(b[perm]), g2)
    assert f1 == pytest.approx(f2, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(pair)
def test_uniform_grid_counts_coordinates(data):
    a, b, _ = data
    count = int(np.sum(a <= b))
    assert fraction_below(curve(a), curve(b), Grid.coordinates(a.size)) == count / a.size
