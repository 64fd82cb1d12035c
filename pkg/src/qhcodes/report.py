"""Serialization of results: JSON bodies, CSV weight tables, markdown tables.

Formatters only lay out values already present in their inputs.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .codes import WeightTable


def weights_report(e: int, r: int, variety: str, table: WeightTable, minimal: str | None = None,
                   d_k: dict | None = None) -> dict:
    body = {
        "e": e,
        "r": r,
        "variety": variety,
        "length": table.length,
        "dimension": r + 1,
        "weights": [{"w": w, "count": c} for w, c in table.weights.items()],
        "mode": table.mode,
    }
    if table.mode == "sampled":
        body["seed"] = table.seed
        body["n_samples"] = table.n_samples
    body["minimal"] = minimal
    body["d_k"] = {str(k): v for k, v in sorted((d_k or {}).items())}
    return body


def dumps(body) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(body, sort_keys=True, indent=2, default=_default) + "\n"


def _default(obj):
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def weights_csv(table: WeightTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["weight", "count", "mode"])
    w.writerows(table.rows())
    return buf.getvalue()


def write_text(path, text: str) -> None:
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc


def markdown_table(items: list[dict]) -> str:
    lines = [
        "| item | claim | expected | computed | status |",
        "|---|---|---|---|---|",
    ]
    for it in items:
        lines.append(
            f"| {it['item']} | {_cell(it['claim'])} | {_cell(it['expected'])} | {_cell(it['computed'])} | {it['status']} |"
        )
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    text = json.dumps(v, default=_default, sort_keys=True) if not isinstance(v, str) else v
    return text.replace("|", "\\|")
