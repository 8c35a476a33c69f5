"""CSV and JSON writers with fixed numeric formatting.

Floats are written with 17 significant digits so that identical inputs give
byte-identical files. Booleans are written as 0/1 in both formats.
"""
from __future__ import annotations

import json
import math
import os
from typing import Any, Mapping, Sequence


class ReportError(Exception):
    pass


def format_value(v: Any) -> str:
    """Scalar as it appears in a CSV cell."""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ReportError(f"non-finite value in report: {v!r}")
        return format(v, ".17g")
    return str(v)


def to_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """json.dumps lookalike that formats floats with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, int, float)):
        return format_value(obj)
    return json.dumps(str(obj))


def emit_report(rows: Sequence[Mapping[str, Any]], path: str, format: str = "csv") -> None:
    """Write ``rows`` (dicts sharing one key set) as CSV or a JSON array."""
    if not rows:
        raise ReportError("refusing to write an empty report")
    columns = list(rows[0].keys())
    for r in rows:
        if list(r.keys()) != columns:
            raise ReportError("all report rows must have the same columns")
    if format == "csv":
        lines = [",".join(columns)]
        lines += [",".join(format_value(r[c]) for c in columns) for r in rows]
        text = "\n".join(lines) + "\n"
    elif format == "json":
        text = to_json([dict(r) for r in rows]) + "\n"
    else:
        raise ReportError(f"unknown report format {format!r}")
    write_text(path, text)


def write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise ReportError(f"output directory does not exist: {directory}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc
