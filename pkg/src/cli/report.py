"""Report emission: JSON lines, or a CSV table written on close."""

import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TextIO

from bethe.solver import RejectedState
from bethe.state import BetheState
from cli.config import OutputFormat
from formfactor.result import ORACLE_TOLERANCE, FormFactorResult
from utils.json_utils import to_json

logger = logging.getLogger(name=__name__)


def state_record(state: BetheState, admissible: bool = True, reason: str | None = None) -> dict[str, Any]:
    return {
        "record": "state",
        "label": state.label,
        "sector": list(state.sector),
        "u": to_json(state.u.array),
        "v": to_json(state.v.array),
        "twist": to_json(state.twist.kappas),
        "l_modes": to_json(state.l_modes),
        "m_modes": to_json(state.m_modes),
        "residual": to_json(state.residual_norm),
        "on_shell": state.on_shell,
        "admissible": admissible,
        "reason": reason,
    }


def rejected_record(rejected: RejectedState) -> dict[str, Any]:
    return state_record(rejected.state, admissible=False, reason=rejected.reason)


def result_record(result: FormFactorResult, tolerance: float | None = None) -> dict[str, Any]:
    """A form-factor record; the tolerance defaults to the one the oracle checks hold this kind of value to."""
    if tolerance is None:
        tolerance = ORACLE_TOLERANCE[result.kind]
    return {
        "record": "form-factor",
        "kind": result.kind.value,
        "states": list(result.states),
        "s": result.s,
        "z": to_json(result.z),
        "m": result.m,
        "sector": [result.a, result.b],
        "value": to_json(result.value),
        "cond": to_json(result.cond),
        "ill_conditioned": result.ill_conditioned,
        "p": result.p,
        "scale": to_json(result.scale),
        "tolerance": tolerance,
    }


def check_record(name: str, error: float, tolerance: float, passed: bool | None = None, **extra: Any) -> dict[str, Any]:
    if passed is None:
        passed = bool(error <= tolerance)
    return {"record": "check", "name": name, "error": to_json(error), "tolerance": tolerance, "passed": passed, **to_json(extra)}


def _flatten(record: dict[str, Any]) -> dict[str, Any]:
    row = {}
    for key, value in record.items():
        row[key] = json.dumps(value) if isinstance(value, (list, dict)) else value
    return row


@dataclass
class ReportWriter:
    """Collects records; JSON lines are streamed, CSV rows are buffered until close."""

    path: str | None = None
    format: OutputFormat = OutputFormat.JSON
    rows: list[dict[str, Any]] = field(default_factory=list)
    _stream: TextIO | None = None

    def __enter__(self) -> "ReportWriter":
        self._stream = open(Path(self.path), "w", encoding="utf-8", newline="") if self.path else sys.stdout
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    def write(self, record: dict[str, Any]) -> None:
        self.rows.append(record)
        if self.format is OutputFormat.JSON and self._stream is not None:
            self._stream.write(json.dumps(record) + "\n")

    def close(self) -> None:
        if self._stream is None:
            return
        if self.format is OutputFormat.CSV:
            self._stream.write(render_csv(self.rows))
        self._stream.flush()
        if self._stream is not sys.stdout:
            self._stream.close()
            logger.info("report with %d records written to %s", len(self.rows), self.path)
        self._stream = None


def render_csv(rows: list[dict[str, Any]]) -> str:
    """One table over the union of all record keys, nested values JSON-encoded."""
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(_flatten(row))
    return buffer.getvalue()
