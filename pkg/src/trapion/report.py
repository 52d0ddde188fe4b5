"""Deterministic JSON / CSV / text-table emitters.

Floats are written with 17 significant digits in scientific notation so a
value reparses to the identical double and repeated runs are byte-equal.
"""

from __future__ import annotations

import csv
import io
import json
import math

SCHEMA_VERSION = "1.0"


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return f"{x + 0.0:.16e}"  # + 0.0 folds -0.0 into 0.0


def _json_value(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _json_value(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _json_value(obj.item(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(payload: dict, indent: int = 2) -> str:
    """Serialize ``payload`` with a leading ``schema_version`` field."""
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(payload)
    return _json_value(doc, indent, 0) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if hasattr(v, "item"):
        return _cell(v.item())
    return str(v)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def to_table(columns, rows) -> str:
    """Aligned plain-text table with 4 significant digits."""

    def short(v):
        if isinstance(v, float) or hasattr(v, "item"):
            return f"{float(v) + 0.0:.4g}"
        return str(v)

    cells = [list(map(str, columns))] + [[short(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render(fmt: str, payload: dict, columns, rows) -> str:
    """Render either the full JSON payload or the tabular part."""
    if fmt == "json":
        return to_json(payload)
    if fmt == "csv":
        return to_csv(columns, rows)
    if fmt in ("table", "text-table"):
        return to_table(columns, rows)
    raise ValueError(f"unknown output format {fmt!r}")
