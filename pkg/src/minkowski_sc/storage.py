"""Curve and trace CSV files, JSON reports and atomic writes."""

import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import polars as pl

from minkowski_sc.constants import CURVE_COLUMNS, FLOAT_FORMAT, TRACE_COLUMNS
from minkowski_sc.curves import TimedPolyline
from minkowski_sc.errors import CurveFormatError

logger = logging.getLogger(__name__)


def format_float(value):
    """17-significant-digit text of a float."""
    return FLOAT_FORMAT.format(float(value))


def atomic_write_text(path, text):
    """Write text next to ``path`` in a temp file, then move it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        Path(tmp_name).replace(path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return path


def _frame(columns, arrays):
    data = {
        name: [format_float(value) for value in values]
        for name, values in zip(columns, arrays)
    }
    return pl.DataFrame(
        data,
        schema={name: pl.String for name in columns},
    )


def _write_csv_text(text, output_file):
    if output_file is None:
        sys.stdout.write(text)
        return None
    return atomic_write_text(output_file, text)


def curve_to_csv(curve):
    """CSV text with header ``t,x,y``, one vertex per line."""
    df = _frame(CURVE_COLUMNS, [curve.params, curve.vertices[:, 0], curve.vertices[:, 1]])
    return df.write_csv()


def save_curve(curve, output_file=None):
    """Save a curve as CSV, or print it when no file is given."""
    path = _write_csv_text(curve_to_csv(curve), output_file)
    if path is not None:
        logger.info(f"Saved {len(curve)} vertices to {path}")
    return path


def trace_to_csv(trace):
    """CSV text with header ``t,zx,zy,residual``."""
    df = _frame(
        TRACE_COLUMNS,
        [trace.t, trace.samples[:, 0], trace.samples[:, 1], trace.residuals],
    )
    return df.write_csv()


def save_trace(trace, output_file=None):
    """Save a bisector trace as CSV, or print it when no file is given."""
    path = _write_csv_text(trace_to_csv(trace), output_file)
    if path is not None:
        logger.info(f"Saved {len(trace.t)} bisector samples to {path}")
    return path


def _first_ragged_line(path, width):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for number, line in enumerate(lines, start=1):
        if line.strip() and line.count(",") != width - 1:
            return number
    return None


def load_curve(input_file):
    """Load a curve CSV written by :func:`save_curve` or by hand.

    Raises:
        FileNotFoundError: If the file does not exist.
        CurveFormatError: On a bad header, a non-numeric or missing field, a
            ragged row, non-increasing t or repeated consecutive vertices.
            The error carries the 1-based line number.
    """
    path = Path(input_file)
    if not path.exists():
        raise FileNotFoundError(f"Curve file not found: {path}")

    try:
        df = pl.read_csv(path, infer_schema=False)
    except pl.exceptions.NoDataError as e:
        raise CurveFormatError("empty file", line=1) from e
    except pl.exceptions.PolarsError as e:
        line = _first_ragged_line(path, len(CURVE_COLUMNS))
        raise CurveFormatError(f"cannot parse CSV ({e})", line=line) from e

    if df.columns != CURVE_COLUMNS:
        raise CurveFormatError(
            f"expected header {','.join(CURVE_COLUMNS)}, got {','.join(df.columns)}", line=1
        )
    if df.height == 0:
        raise CurveFormatError("no vertices", line=2)

    numeric = df.select(
        pl.col(name).str.strip_chars().cast(pl.Float64, strict=False)
        for name in CURVE_COLUMNS
    )
    bad = numeric.select(
        pl.any_horizontal(
            ~pl.col(name).is_finite().fill_null(False) for name in CURVE_COLUMNS
        )
    )
    bad_rows = np.flatnonzero(bad.to_series().to_numpy())
    if bad_rows.size:
        row = int(bad_rows[0])
        raise CurveFormatError(f"non-numeric or missing value in {df.row(row)}", line=row + 2)

    values = numeric.to_numpy()
    params = values[:, 0]
    vertices = values[:, 1:]
    decreasing = np.flatnonzero(np.diff(params) <= 0)
    if decreasing.size:
        raise CurveFormatError("t must be strictly increasing", line=int(decreasing[0]) + 3)
    repeated = np.flatnonzero(np.all(vertices[1:] == vertices[:-1], axis=1))
    if repeated.size:
        raise CurveFormatError("vertex repeats the previous one", line=int(repeated[0]) + 3)

    logger.info(f"Loaded {len(values)} vertices from {path}")
    return TimedPolyline(vertices, params)


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def report_to_json(report):
    """Indented JSON text with insertion-ordered keys."""
    return json.dumps(report, indent=2, ensure_ascii=False, default=_json_default) + "\n"


def write_report(report, output_file=None):
    """Write a JSON report to ``output_file`` or stdout."""
    text = report_to_json(report)
    if output_file is None:
        sys.stdout.write(text)
        return None
    path = atomic_write_text(output_file, text)
    logger.info(f"Report written to {path}")
    return path


