"""Envelope CSV format shared by the propagator export and the trace loader.

Layout::

    # key=value            (any number of provenance comment lines)
    time_us,probe_in_norm,probe_out_norm,signal_out_norm
    0,0,0,0
    ...

Powers are normalized to the incident probe peak.  Numbers use 9
significant digits.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import TraceFormatError
from .units import RB87_D2, PhysicalConstants, gamma_time_to_us

__all__ = [
    "ENVELOPE_COLUMNS",
    "format_number",
    "format_header",
    "envelope_table",
    "write_envelope_csv",
    "read_table",
]

ENVELOPE_COLUMNS = ("time_us", "probe_in_norm", "probe_out_norm", "signal_out_norm")


def format_number(value) -> str:
    return f"{float(value):.9g}"


def _flatten(meta: Mapping, prefix: str = "") -> Iterable[tuple[str, str]]:
    for key, value in meta.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            yield from _flatten(value, name + ".")
        elif isinstance(value, complex):
            yield name, (format_number(value.real) if value.imag == 0 else repr(value))
        elif isinstance(value, float):
            yield name, format_number(value)
        else:
            yield name, str(value)


def format_header(meta: Mapping) -> list[str]:
    """Flatten nested metadata to ``# key=value`` comment lines."""
    return [f"# {k}={v}" for k, v in _flatten(meta)]


def envelope_table(result, stride: int = 1,
                   consts: PhysicalConstants = RB87_D2) -> np.ndarray:
    """Rows of (time_us, probe_in, probe_out, signal_out) normalized powers."""
    peak = float(np.max(result.probe_in.power))
    if peak <= 0:
        raise ValueError("incident probe has zero peak power")
    sl = slice(None, None, max(1, int(stride)))
    t_us = gamma_time_to_us(result.probe_in.time[sl], consts)
    return np.column_stack([
        t_us,
        result.probe_in.power[sl] / peak,
        result.probe_out.power[sl] / peak,
        result.signal_out.power[sl] / peak,
    ])


def write_envelope_csv(result, path, meta: Mapping | None = None, stride: int = 1,
                       consts: PhysicalConstants = RB87_D2) -> Path:
    table = envelope_table(result, stride, consts)
    meta = dict(result.metadata if meta is None else meta)
    buf = io.StringIO()
    for line in format_header(meta):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ENVELOPE_COLUMNS)
    for row in table:
        writer.writerow([format_number(v) for v in row])
    path = Path(path)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def read_table(path, allow_nan: bool = False) -> tuple[dict[str, str], list[str], list[list[float]]]:
    """Parse a commented CSV into (metadata, column names, numeric rows).

    Row numbers in errors count lines of the file, starting at 1.  NaN cells
    (such as the delay column of an analytic sweep) are rejected unless
    ``allow_nan`` is set; infinities always are.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceFormatError(f"cannot read {path}: {exc}") from exc
    meta: dict[str, str] = {}
    columns: list[str] | None = None
    rows: list[list[float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        fields = next(csv.reader([stripped]))
        if columns is None:
            columns = [f.strip() for f in fields]
            continue
        if len(fields) != len(columns):
            raise TraceFormatError(
                f"{path}:{lineno}: expected {len(columns)} fields, got {len(fields)}", row=lineno)
        values = []
        for name, raw in zip(columns, fields):
            try:
                value = float(raw)
            except ValueError:
                raise TraceFormatError(
                    f"{path}:{lineno}: column {name!r} is not a number: {raw!r}",
                    row=lineno, column=name) from None
            if math.isinf(value) or (math.isnan(value) and not allow_nan):
                raise TraceFormatError(f"{path}:{lineno}: column {name!r} is not finite",
                                       row=lineno, column=name)
            values.append(value)
        rows.append(values)
    if columns is None:
        raise TraceFormatError(f"{path}: no header row found (empty file?)")
    return meta, columns, rows
