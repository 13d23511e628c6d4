"""Serializable experiment reports: CSV rows plus a JSON config/summary block."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class Check:
    name: str
    invariant: str
    passed: bool
    measured: object
    threshold: object = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        thr = "" if self.threshold is None else f" threshold={_fmt(self.threshold)}"
        return f"{status} {self.name} [{self.invariant}]: measured={_fmt(self.measured)}{thr}"

    def to_json_obj(self) -> dict:
        return {"name": self.name, "invariant": self.invariant, "passed": self.passed,
                "measured": _jsonable(self.measured), "threshold": _jsonable(self.threshold)}


@dataclass
class ExperimentReport:
    command: str
    config: dict
    rows: list[dict] = field(default_factory=list)
    summary: list[Check] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.summary)

    def check(self, name: str, invariant: str, passed: bool, measured, threshold=None) -> Check:
        c = Check(name, invariant, bool(passed), measured, threshold)
        self.summary.append(c)
        return c

    def columns(self) -> list[str]:
        cols: list[str] = []
        for row in self.rows:
            for k in row:
                if k not in cols:
                    cols.append(k)
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = self.columns()
        writer.writerow(cols)
        for row in self.rows:
            writer.writerow([_fmt(row.get(c, "")) for c in cols])
        return buf.getvalue()

    def to_json_obj(self, with_rows: bool = False) -> dict:
        obj = {"command": self.command, "config": _jsonable(self.config),
               "passed": self.passed, "summary": [c.to_json_obj() for c in self.summary]}
        if self.extra:
            obj.update(_jsonable(self.extra))
        if with_rows:
            obj["rows"] = [_jsonable(r) for r in self.rows]
        return obj

    def to_json(self, with_rows: bool = False) -> str:
        return json.dumps(self.to_json_obj(with_rows), indent=2) + "\n"

    def write(self, out_dir: Path, fmt: str = "csv") -> list[Path]:
        """Write ``<stem>.csv`` (or rows inside the JSON) and ``<stem>.json``."""
        out_dir = Path(out_dir)
        stem = self.command.replace(" ", "_").replace("-", "_")
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            written = []
            if fmt == "csv":
                p = out_dir / f"{stem}.csv"
                p.write_text(self.to_csv())
                written.append(p)
            p = out_dir / f"{stem}.json"
            p.write_text(self.to_json(with_rows=(fmt == "json")))
            written.append(p)
        except OSError as exc:
            raise OSError(f"cannot write report to {out_dir}: {exc}") from exc
        return written


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "to_json_obj"):
        return v.to_json_obj()
    return v
