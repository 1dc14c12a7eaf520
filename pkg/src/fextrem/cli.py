"""Command-line interface.

Commands: ``extremality``, ``band``, ``ranktest`` and ``simulate``. Exit
status is 0 on success, 1 on usage errors and 2 on data errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bands import PROCESSES, central_region, simulate_consistency
from .core import ConformanceError, ExtremalityKind
from .io import DataError, dumps_json, format_float, parse_curves
from .measures import batch_extremality
from .ranktest import rank_test

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
KIND_FLAGS = tuple(k.value for k in ExtremalityKind)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    kind: str | None = None
    hyper_kind: str = "hyper"
    hypo_kind: str = "hypo"
    alpha_hyper: float = 0.1
    alpha_hypo: float = 0.1
    method: str = "auto"
    alternative: str = "less"
    tie_policy: str = "paper-order"
    split: float | None = None
    seed: int | None = None
    process: str = "uniform-constant"
    n_list: tuple = (10, 100, 1000, 10000)
    grid_size: int = 10
    reps: int = 100
    output_format: str = "json"
    output: str | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output_format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.output_format!r}")
        if self.command in ("extremality", "ranktest") and self.kind not in KIND_FLAGS:
            raise UsageError(f"--kind must be one of {', '.join(KIND_FLAGS)}")
        if self.command in ("extremality", "band") and not self.inputs.get("input"):
            raise UsageError("--input is required")
        if self.command == "ranktest":
            if not self.inputs.get("sample_x") or not self.inputs.get("sample_y"):
                raise UsageError("--sample-x and --sample-y are required")
            has_ref = bool(self.inputs.get("reference"))
            if has_ref == (self.split is not None):
                raise UsageError("give exactly one of --reference or --split")
            if self.split is not None:
                if not 0 < self.split < 1:
                    raise UsageError("--split must lie strictly between 0 and 1")
                if self.seed is None:
                    raise UsageError("--split needs --seed")
            if self.tie_policy == "random" and self.seed is None:
                raise UsageError("--tie-policy random needs --seed")
            if self.output_format != "json":
                raise UsageError("ranktest only writes json")
        if self.command == "simulate":
            if self.seed is None:
                raise UsageError("simulate needs --seed")
            if self.process not in PROCESSES:
                raise UsageError(f"--process must be one of {', '.join(PROCESSES)}")


def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _cmd_extremality(cfg: RunConfig) -> str:
    curves = parse_curves(cfg.inputs["input"])
    report = batch_extremality(curves, cfg.kind)
    order = sorted(range(len(report)), key=lambda i: -report.scores[i])
    if cfg.output_format == "json":
        return dumps_json([{"id": report.ids[i], "score": float(report.scores[i])} for i in order])
    return _csv_text([["id", "score"]] + [[report.ids[i], format_float(report.scores[i])] for i in order])


def _cmd_band(cfg: RunConfig) -> str:
    curves = parse_curves(cfg.inputs["input"])
    region = central_region(curves, cfg.hyper_kind, cfg.hypo_kind, cfg.alpha_hyper, cfg.alpha_hypo)
    if cfg.output_format == "json":
        return dumps_json(
            {
                "hyper_kind": region.hyper_kind.value,
                "hypo_kind": region.hypo_kind.value,
                "alpha_hyper": cfg.alpha_hyper,
                "alpha_hypo": cfg.alpha_hypo,
                "grid": curves.grid.points,
                "kept": list(region.kept),
                "trimmed_high": list(region.trimmed_high),
                "trimmed_low": list(region.trimmed_low),
                "envelope": {
                    "min": region.envelope_min.values,
                    "max": region.envelope_max.values,
                },
                "curves": [
                    {
                        "id": cid,
                        "role": region.role(cid),
                        "hyper_score": float(region.hyper_scores[i]),
                        "hypo_score": float(region.hypo_scores[i]),
                    }
                    for i, cid in enumerate(curves.ids)
                ],
            }
        )
    rows = [["id", "role", *map(format_float, curves.grid.points)]]
    for cid, values in zip(curves.ids, curves.values):
        rows.append([cid, region.role(cid), *map(format_float, values)])
    rows.append(["envelope_min", "envelope", *map(format_float, region.envelope_min.values)])
    rows.append(["envelope_max", "envelope", *map(format_float, region.envelope_max.values)])
    return _csv_text(rows)


def _cmd_ranktest(cfg: RunConfig) -> str:
    sample_x = parse_curves(cfg.inputs["sample_x"])
    sample_y = parse_curves(cfg.inputs["sample_y"])
    if cfg.split is not None:
        rng = np.random.default_rng(cfg.seed)
        perm = rng.permutation(len(sample_x))
        n_ref = int(round(cfg.split * len(sample_x)))
        if n_ref < 1 or n_ref >= len(sample_x):
            raise DataError(
                f"--split {cfg.split} leaves an empty reference or an empty sample x "
                f"({len(sample_x)} curves)"
            )
        reference = sample_x.subset(np.sort(perm[:n_ref]))
        sample_x = sample_x.subset(np.sort(perm[n_ref:]))
        source = "split"
    else:
        reference = parse_curves(cfg.inputs["reference"])
        source = "file"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = rank_test(
            sample_x,
            sample_y,
            reference,
            kind=cfg.kind,
            method=cfg.method,
            tie_policy=cfg.tie_policy,
            alternative=cfg.alternative,
            seed=cfg.seed,
        )
    for w in caught:
        print(f"fextrem: warning: {w.message}", file=sys.stderr)
    em = {("X", s.id): s.em for s in result.x_scores}
    em.update({("Y", s.id): s.em for s in result.y_scores})
    return dumps_json(
        {
            "w": result.w,
            "p_value": result.p_value,
            "method": result.method,
            "alternative": result.alternative,
            "kind": result.kind.value,
            "tie_policy": cfg.tie_policy,
            "n": result.n,
            "m": result.m,
            "n0": result.n0,
            "reference": source,
            "ranks": [
                {
                    "id": e.id,
                    "sample": e.label,
                    "em": em[(e.label, e.id)],
                    "r": e.r,
                    "rank": e.rank,
                }
                for e in result.assignment.entries
            ],
        }
    )


def _cmd_simulate(cfg: RunConfig) -> str:
    summary = simulate_consistency(cfg.process, cfg.n_list, cfg.grid_size, cfg.reps, cfg.seed)
    if cfg.output_format == "json":
        return dumps_json(
            {
                "process": summary.process,
                "seed": summary.seed,
                "reps": summary.reps,
                "grid_size": cfg.grid_size,
                "n_values": list(summary.n_values),
                "levels": list(summary.levels),
                "population": summary.population,
                "errors": summary.errors,
                "errors_by_level": summary.errors_by_level,
            }
        )
    rows = [["n", "mean_abs_error", *(f"c={format_float(c)}" for c in summary.levels)]]
    for n, err, by_level in zip(summary.n_values, summary.errors, summary.errors_by_level):
        rows.append([n, format_float(err), *map(format_float, by_level)])
    return _csv_text(rows)


COMMANDS = {
    "extremality": _cmd_extremality,
    "band": _cmd_band,
    "ranktest": _cmd_ranktest,
    "simulate": _cmd_simulate,
}


def run(config: RunConfig) -> int:
    """Execute one command; returns the exit status."""
    try:
        config.validate()
        text = COMMANDS[config.command](config)
    except UsageError as exc:
        print(f"fextrem: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ConformanceError, ValueError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"fextrem: error: {msg}", file=sys.stderr)
        return EXIT_DATA
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _n_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fextrem", description="Extremality measures for samples of curves.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
        p.add_argument("--output", "-o", help="output file (default: standard output)")

    p = sub.add_parser("extremality", help="score every curve of a file")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=KIND_FLAGS, required=True)
    common(p)

    p = sub.add_parser("band", help="trimmed central region and its envelope")
    p.add_argument("--input", required=True)
    p.add_argument("--hyper-kind", choices=("hyper", "gen-hyper"), default="hyper")
    p.add_argument("--hypo-kind", choices=("hypo", "gen-hypo"), default="hypo")
    p.add_argument("--alpha-hyper", type=float, default=0.1)
    p.add_argument("--alpha-hypo", type=float, default=0.1)
    common(p)

    p = sub.add_parser("ranktest", help="two-sample rank test")
    p.add_argument("--sample-x", required=True)
    p.add_argument("--sample-y", required=True)
    p.add_argument("--reference")
    p.add_argument("--split", type=float, help="carve the reference out of sample x")
    p.add_argument("--kind", choices=KIND_FLAGS, required=True)
    p.add_argument("--method", choices=("exact", "normal", "auto"), default="auto")
    p.add_argument("--alternative", choices=("less", "two-sided"), default="less")
    p.add_argument("--tie-policy", choices=("paper-order", "random"), default="paper-order")
    p.add_argument("--seed", type=int)
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo consistency check")
    p.add_argument("--process", choices=PROCESSES, default="uniform-constant")
    p.add_argument("--n", dest="n_list", type=_n_list, default=(10, 100, 1000, 10000))
    p.add_argument("--grid-size", type=int, default=10)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    common(p)
    return parser


def config_from_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    args = vars(ns)
    inputs = {k: args.pop(k) for k in ("input", "sample_x", "sample_y", "reference") if k in args}
    return RunConfig(inputs=inputs, **args)


def main(argv=None) -> int:
    try:
        config = config_from_args(argv)
    except UsageError as exc:
        print(f"fextrem: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
