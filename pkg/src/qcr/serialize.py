"""Report serialization: JSON with 17-significant-digit floats, and CSV.

The JSON writer is deliberately tiny and deterministic so that parsing an
emitted report and re-serializing it reproduces the bytes exactly.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ValidationError

FLOAT_FORMAT = ".17g"


def _format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValidationError("reports must not contain NaN or infinite values")
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero so round-trips stay byte-stable
    return format(x, FLOAT_FORMAT)


def _serialize(obj, indent: int, pieces: list[str]) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            pieces.append("{}")
            return
        pieces.append("{\n")
        for i, (key, val) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise ValidationError(f"report keys must be strings, got {key!r}")
            pieces.append(f"{pad}  {json.dumps(key)}: ")
            _serialize(val, indent + 1, pieces)
            pieces.append(",\n" if i + 1 < len(obj) else "\n")
        pieces.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            pieces.append("[]")
            return
        pieces.append("[\n")
        for i, val in enumerate(obj):
            pieces.append(pad + "  ")
            _serialize(val, indent + 1, pieces)
            pieces.append(",\n" if i + 1 < len(obj) else "\n")
        pieces.append(pad + "]")
    elif isinstance(obj, bool):
        pieces.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        pieces.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif obj is None:
        pieces.append("null")
    else:
        raise ValidationError(f"cannot serialize {type(obj).__name__} into a report")


def dumps_report(report: dict) -> str:
    pieces: list[str] = []
    _serialize(report, 0, pieces)
    pieces.append("\n")
    return "".join(pieces)


def matrix_to_lists(m: np.ndarray) -> list:
    """Real matrix as nested float lists."""
    return [[float(x) for x in row] for row in np.asarray(m, dtype=float)]


def complex_matrix_to_lists(m: np.ndarray) -> dict:
    """Complex matrix as {re, im} nested float lists."""
    a = np.asarray(m, dtype=complex)
    return {"re": matrix_to_lists(a.real), "im": matrix_to_lists(a.imag)}


def vector_to_list(v: np.ndarray) -> list:
    return [float(x) for x in np.asarray(v, dtype=float)]


def write_csv(path: str, header: list[str], rows: list[list[float]]) -> None:
    """CSV with one header row, 17-significant-digit decimals and LF endings."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_float(float(x)) for x in row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
