"""Extremality measures, central regions and rank tests for curve samples."""

from .bands import (
    CentralRegion,
    CentralRegionTrimmer,
    SimulationSummary,
    central_region,
    far_curve_probe,
    simulate_consistency,
)
from .core import (
    ConformanceError,
    Curve,
    CurveSet,
    ExtremalityKind,
    Grid,
    fraction_below,
    pointwise_below,
)
from .io import DataError, parse_curves, write_curves
from .measures import (
    ExtremalityMeasure,
    ExtremalityReport,
    batch_extremality,
    gen_hyperextremality,
    gen_hypoextremality,
    hyperextremality,
    hypoextremality,
    naive_extremality,
    score_curves,
)
from .ranktest import (
    FunctionalRankTest,
    NullDistribution,
    RankAssignment,
    RankTestResult,
    RScore,
    assign_ranks,
    exact_null,
    normal_p_value,
    r_scores,
    rank_test,
    w_statistic,
)

__version__ = "0.1.0"
