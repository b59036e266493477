"""Formatting helpers for CSV/JSON emission.

CSV floats are printed with 17 significant digits so every value survives a
parse round trip bit-for-bit.  JSON relies on Python's shortest round-trip
repr, which is equally lossless.
"""

from __future__ import annotations

import json
import math


def fmt(x: float) -> str:
    if isinstance(x, int):
        return str(x)
    if math.isnan(x):
        return "nan"
    return "%.17g" % x


def dump_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def write_csv(path, columns: list[str], rows, header_comments=()) -> None:
    """Write a CSV with optional '# key: value' comment lines on top."""
    lines = [f"# {c}" for c in header_comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else fmt(cell) for cell in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
