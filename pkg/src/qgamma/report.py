"""Byte-stable JSON and CSV serialization of verification reports.

Every report type is first flattened into the common record
``{id, grid, checks: [{point, quantity, value, threshold, pass, err}], verdict, notes}``.
Checks are sorted by ``(q, x, s, c, quantity)`` and floats are written with 17
significant digits, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Iterable, Union

from .certificates import CertificateReport, CMReport
from .theorems import TheoremReport

CSV_COLUMNS = ("id", "q", "x", "s", "c", "quantity", "value", "threshold", "pass")
POINT_KEYS = ("q", "x", "s", "c")

Report = Union[TheoremReport, CertificateReport, CMReport]


@dataclass(frozen=True)
class RunConfig:
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.fmt!r}")


def fmt_float(v: float) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    v = float(v)
    if not math.isfinite(v):
        return "null"
    return "%.17g" % v


def _sort_key(chk: dict):
    def part(v):
        return (0, 0.0) if v is None else (1, float(v))

    p = chk["point"]
    return tuple(part(p.get(k)) for k in POINT_KEYS) + (chk["quantity"],)


def _check(point, quantity, value, threshold, passed, err=0.0) -> dict:
    return {
        "point": {k: point.get(k) for k in POINT_KEYS},
        "quantity": quantity,
        "value": value,
        "threshold": threshold,
        "pass": bool(passed),
        "err": err,
    }


def to_record(report: Report) -> dict:
    """Flatten any report type into the common schema."""
    if isinstance(report, TheoremReport):
        checks = [_check(c.point, c.quantity, c.value, c.threshold, c.passed, c.err) for c in report.checks]
        rec = {
            "id": report.id.value,
            "grid": report.grid.as_dict(),
            "checks": checks,
            "verdict": report.verdict,
            "notes": list(report.notes),
        }
    elif isinstance(report, CertificateReport):
        fam = report.family
        checks = [
            _check({"q": q, "s": fam.s, "c": fam.c}, f"min_coefficient[n={n}]", m, 0.0, ok)
            for q, m, n, ok in report.per_q
        ]
        notes = []
        if report.first_failure is not None:
            n, q = report.first_failure
            notes.append(f"first negative coefficient at n={n}, q={fmt_float(q)}")
        rec = {
            "id": fam.label(),
            "grid": {"n_range": list(report.n_range), "q_values": list(report.q_grid)},
            "checks": checks,
            "verdict": report.verdict,
            "notes": notes,
        }
    elif isinstance(report, CMReport):
        x, k = report.witness
        rec = {
            "id": report.function_id,
            "grid": {"x_values": list(report.x_grid), "h": report.h, "K": report.K},
            "checks": [_check({"x": x}, f"worst_signed_difference[k={k}]", report.worst, -report.cm_tol, report.verdict)],
            "verdict": report.verdict,
            "notes": [],
        }
    else:
        raise TypeError(f"cannot serialize {type(report).__name__}")
    rec["checks"].sort(key=_sort_key)
    return rec


def _json(obj, indent=0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)):
        return fmt_float(obj) if isinstance(obj, float) else str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json(str(k))}: {_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _json(obj.item(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    return _json(obj) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def dumps_csv(records: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        for chk in rec["checks"]:
            p = chk["point"]
            w.writerow(
                [rec["id"]]
                + [_cell(p.get(k)) for k in POINT_KEYS]
                + [chk["quantity"], _cell(chk["value"]), _cell(chk["threshold"]), _cell(chk["pass"])]
            )
    return buf.getvalue()


def render(reports: Report | list[Report], fmt: str = "json") -> str:
    """A single report renders as one object; a list renders as an array."""
    single = not isinstance(reports, list)
    records = [to_record(r) for r in ([reports] if single else reports)]
    if fmt == "csv":
        return dumps_csv(records)
    return dumps_json(records[0] if single else records)


def write_text(text: str, out: str | None) -> None:
    """Write to ``out`` or stdout.  OSError propagates (the CLI maps it to exit 2)."""
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def emit_report(report: Report | list[Report], cfg: RunConfig = RunConfig()) -> None:
    write_text(render(report, cfg.fmt), cfg.out)
