#!/usr/bin/env python3
"""
Serialization of check results: JSON for machines, aligned text for people.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import csv
import io
import json
import math
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from .checks import CheckResult

TABLE_COLUMNS = ("checkId", "instance", "note", "lhs", "rhs", "margin", "status")


def _finite(value: Any) -> Any:
    """Recursively replace non-finite floats with None so the output is strict JSON."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, Mapping):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def to_json(payload: Any) -> str:
    """JSON text; floats keep their shortest round-trip repr."""
    return json.dumps(_finite(payload), indent=2, allow_nan=False)


def results_payload(
    results: Sequence[CheckResult], header: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    payload: Dict[str, Any] = dict(header or {})
    payload["checks"] = len(results)
    payload["violations"] = sum(1 for r in results if not r.passed)
    payload["results"] = [r.to_dict() for r in results]
    return payload


def _status(result: CheckResult) -> str:
    if not result.applicable:
        return "n/a"
    return "PASS" if result.passed else "FAIL"


def _number(value: float) -> str:
    return f"{value:.10g}"


def results_table(results: Iterable[CheckResult], header: Optional[str] = None) -> str:
    """Aligned plain-text table, one row per result."""
    rows: List[List[str]] = [list(TABLE_COLUMNS)]
    for r in results:
        numbers = ["", "", ""]
        if r.applicable:
            numbers = [_number(r.lhs), _number(r.rhs), _number(r.margin)]
        rows.append([r.check_id, r.context, r.note, *numbers, _status(r)])
    widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
    numeric = {3, 4, 5}
    lines = [header] if header else []
    for j, row in enumerate(rows):
        cells = [
            cell.rjust(widths[i]) if i in numeric and j > 0 else cell.ljust(widths[i])
            for i, cell in enumerate(row)
        ]
        lines.append("  ".join(cells).rstrip())
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def summary_table(summary: Mapping[str, Any]) -> str:
    width = max((len(k) for k in summary), default=0)
    return "\n".join(f"{key.ljust(width)}  {value}" for key, value in summary.items())


def rows_to_csv(rows: Sequence[Mapping[str, Any]]) -> str:
    """CSV text with a header taken from the first row; floats written with 17 digits."""
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: f"{v:.17g}" if isinstance(v, float) else v for k, v in row.items()})
    return buffer.getvalue()


__all__ = ["results_payload", "results_table", "rows_to_csv", "summary_table", "to_json"]
