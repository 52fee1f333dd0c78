"""
Run reports: the structured result of one CLI command.

Field order is fixed (command, input_digest, result, timing_ms) and the
digest covers everything except timing, so identical inputs give identical
reports.
"""
import json
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from utils.path_utils import digest_text


@dataclass
class RunReport:
    command: List[str]
    input_digest: str
    result: Dict[str, Any]
    timing_ms: Optional[int] = None

    def to_json(self, with_timing: bool = True) -> Dict[str, Any]:
        data = {
            "command": self.command,
            "input_digest": self.input_digest,
            "result": self.result,
        }
        if with_timing:
            data["timing_ms"] = self.timing_ms
        return data

    @property
    def digest(self) -> str:
        """sha256 of the canonical report without timing."""
        return digest_text(json.dumps(self.to_json(with_timing=False), sort_keys=False))

    def render(self, fmt: str = "json", with_timing: bool = True) -> str:
        if fmt == "text":
            return render_text(self, with_timing)
        return json.dumps(self.to_json(with_timing), indent=2, ensure_ascii=False) + "\n"


class Stopwatch:
    def __init__(self):
        self.elapsed_ms = 0

    @contextmanager
    def running(self):
        start = time.perf_counter()
        try:
            yield self
        finally:
            self.elapsed_ms = int(round((time.perf_counter() - start) * 1000))


def format_table(rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    """Aligned plain-text table, one row per dict."""
    if not rows:
        return "(empty)"
    columns = list(columns or rows[0].keys())
    cells = [[_cell(row.get(c)) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[k]) for r in cells)) for k, c in enumerate(columns)]
    header = "  ".join(c.ljust(w) for c, w in zip(columns, widths))
    rule = "  ".join("-" * w for w in widths)
    body = ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells]
    return "\n".join([header, rule, *body])


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_cell(v) for v in value) + "]"
    if isinstance(value, dict):
        return json.dumps(value, ensure_ascii=False)
    return str(value)


def render_text(report: RunReport, with_timing: bool = True) -> str:
    lines = [f"command: {' '.join(report.command)}", f"input_digest: {report.input_digest}"]
    for key, value in report.result.items():
        if isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            lines.append(f"{key}:")
            lines.append(format_table(value))
        elif isinstance(value, list) and value and all(isinstance(v, str) for v in value):
            lines.append(f"{key}:")
            lines.extend(f"  {v}" for v in value)
        else:
            lines.append(f"{key}: {_cell(value)}")
    if with_timing and report.timing_ms is not None:
        lines.append(f"timing_ms: {report.timing_ms}")
    return "\n".join(lines) + "\n"
