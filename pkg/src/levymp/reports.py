"""Report emission: JSON with 17-significant-digit floats, atomic file writes,
and the fixed CSV schemas."""

from __future__ import annotations

import json
import math
import os
import tempfile


def format_float(x: float) -> str:
    """17 significant digits: enough to round-trip any double bit-exactly."""
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with full-precision floats; accepts dict/list/scalars."""

    def emit(node, depth):
        pad = " " * (indent * depth)
        inner = " " * (indent * (depth + 1))
        if isinstance(node, dict):
            if not node:
                return "{}"
            items = [
                f"{inner}{json.dumps(str(key))}: {emit(val, depth + 1)}"
                for key, val in node.items()
            ]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(node, (list, tuple)):
            if not node:
                return "[]"
            items = [f"{inner}{emit(val, depth + 1)}" for val in node]
            return "[\n" + ",\n".join(items) + "\n" + pad + "]"
        if isinstance(node, bool) or node is None:
            return json.dumps(node)
        if isinstance(node, float):
            return format_float(node)
        if isinstance(node, int):
            return str(node)
        if isinstance(node, str):
            return json.dumps(node)
        raise TypeError(f"cannot serialize {type(node).__name__}")

    return emit(obj, 0) + "\n"


def loads(text: str):
    return json.loads(text)


def atomic_write_text(path: str, text: str):
    """Write-to-temp plus rename: readers never observe a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    """CSV with full-precision floats and a fixed header row."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append(format_float(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_json(path: str, obj):
    atomic_write_text(path, dumps(obj))


def write_csv(path: str, header, rows):
    atomic_write_text(path, csv_text(header, rows))
