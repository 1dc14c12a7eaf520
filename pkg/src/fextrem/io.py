"""Wide-CSV curve files and JSON output.

File layout: the header row is ``id`` followed by the grid points; every
following row is a curve id and its values at those points.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .core import CurveSet, Grid

__all__ = ["DataError", "dumps_json", "format_float", "parse_curves", "write_curves"]


class DataError(ValueError):
    """Malformed input data."""


def _parse_number(text: str, where: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{where}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise DataError(f"{where}: value {text!r} is not finite")
    return value


def parse_curves(path) -> CurveSet:
    """Read a wide CSV curve file into a :class:`CurveSet` with trapezoidal weights."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    return _parse_text(text, str(path))


def _parse_text(text: str, source: str) -> CurveSet:
    reader = csv.reader(io.StringIO(text))
    header = None
    ids, rows, seen = [], [], {}
    for row in reader:
        line = reader.line_num
        if not row or all(not f.strip() for f in row):
            continue
        if header is None:
            if len(row) < 2:
                raise DataError(f"{source}:{line}: header needs an id column and at least one grid point")
            points = [
                _parse_number(f.strip(), f"{source}:{line}: header column {k}")
                for k, f in enumerate(row[1:], start=1)
            ]
            for k in range(1, len(points)):
                if not points[k] > points[k - 1]:
                    raise DataError(
                        f"{source}:{line}: grid point in column {k + 1} ({row[k + 1].strip()}) "
                        "is not greater than the previous one"
                    )
            header = points
            continue
        if len(row) != len(header) + 1:
            raise DataError(
                f"{source}:{line}: expected {len(header) + 1} fields, found {len(row)}"
            )
        curve_id = row[0].strip()
        if not curve_id:
            raise DataError(f"{source}:{line}: empty curve id")
        if curve_id in seen:
            raise DataError(
                f"{source}:{line}: duplicate curve id {curve_id!r} (first seen on line {seen[curve_id]})"
            )
        seen[curve_id] = line
        rows.append(
            [_parse_number(f.strip(), f"{source}:{line}: column {k}") for k, f in enumerate(row[1:], start=1)]
        )
        ids.append(curve_id)
    if header is None:
        raise DataError(f"{source}: empty file, no header")
    if not rows:
        raise DataError(f"{source}: no curves")
    return CurveSet(Grid(header), np.array(rows), tuple(ids))


def write_curves(curves: CurveSet, path=None) -> str:
    """Write ``curves`` as wide CSV; returns the text, also written to ``path`` if given.

    Floats use the shortest round-tripping repr, so parsing the output
    recovers the values bit for bit.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", *map(repr, curves.grid.points.tolist())])
    for curve_id, values in zip(curves.ids, curves.values.tolist()):
        writer.writerow([curve_id, *map(repr, values)])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _encode(obj, indent: str, level: int) -> str:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise ValueError(f"cannot encode non-finite float {obj!r}")
        return format_float(obj)
    pad = "\n" + indent * (level + 1)
    end = "\n" + indent * level
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        if not seq:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in seq]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    """JSON text with every float written at 17 significant digits."""
    return _encode(obj, " " * indent, 0) + "\n"
