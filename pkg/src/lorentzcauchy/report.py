"""One JSON report layout for every experiment, plus text and CSV renderers.

A report is ``{"subcommand", "config", "verdicts", "witnesses", "timing"}``.
Everything except ``timing`` is a deterministic function of the config, so
two runs with the same seed differ only in that field.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SCOPE_NOTE = (
    "Completeness of the space of weak Cauchy sets under d_J and the implication "
    "chain between finite compactness, timelike Cauchy completeness and the "
    "curve completeness condition are theorems about infinite objects. They are "
    "not reproduced numerically; the suites check their finite consequences "
    "(verdicts that must occur together on sampled models)."
)


def plain(obj):
    """Convert numpy scalars, arrays and tuples into JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        return v
    return obj


def verdict(check: str, ok: bool, value=None, detail: str = "") -> dict:
    return {"check": check, "ok": bool(ok), "value": plain(value), "detail": detail}


def witness(check: str, invariant: str, tuple_) -> dict:
    return {"check": check, "invariant": invariant, "witness": plain(tuple_)}


def make_report(subcommand: str, config: dict, verdicts: list[dict], witnesses: list[dict], seconds: float) -> dict:
    return {
        "subcommand": subcommand,
        "config": plain(config),
        "verdicts": verdicts,
        "witnesses": witnesses,
        "timing": {"wall_seconds": round(float(seconds), 6)},
    }


def dumps(report: dict) -> str:
    return json.dumps(plain(report), indent=2) + "\n"


def report_ok(report: dict) -> bool:
    return all(v.get("ok", True) for v in report.get("verdicts", []))


def text_table(rows: Sequence[Sequence], headers: Sequence[str]) -> str:
    """Left-aligned columns separated by two spaces."""
    cells = [[str(h) for h in headers]] + [[_cell(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    v = plain(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return "" if v is None else str(v)


def verdict_table(report: dict) -> str:
    rows = [(report["subcommand"], v["check"], "pass" if v["ok"] else "FAIL", v["value"], v["detail"]) for v in report["verdicts"]]
    return text_table(rows, ["subcommand", "check", "status", "value", "detail"])


def csv_text(headers: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(headers)
    for r in rows:
        w.writerow([_csv_cell(v) for v in r])
    return buf.getvalue()


def _csv_cell(v):
    v = plain(v)
    return repr(v) if isinstance(v, float) else v


def matrix_csv(matrix, labels: Sequence[str]) -> str:
    m = np.asarray(matrix, dtype=float)
    return csv_text([""] + list(labels), ([lab] + list(row) for lab, row in zip(labels, m)))


def load_reports(paths: Iterable[str | Path]) -> list[dict]:
    out = []
    for p in paths:
        out.append(json.loads(Path(p).read_text()))
    return out
