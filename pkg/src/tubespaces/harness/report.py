"""Suite report records, serialization, and atomic export.

Reports are deterministic for a fixed config and seed: no timestamps, floats
serialized by repr (shortest round-trip), keys emitted in sorted order.  Wall
times are recorded only when the config opts in, since they would break the
byte-identical rerun contract.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field

CSV_COLUMNS = ["case_id", "claim", "target_provenance", "inputs", "computed",
               "oracle", "stated", "passed", "detail", "runtime_s"]


@dataclass
class CaseRecord:
    case_id: str
    claim: str
    inputs: dict
    computed: float | str | None
    oracle: float | str | None
    passed: bool
    stated: float | str | None = None
    target_provenance: str = "oracle"   # pass/fail judged against the oracle
    detail: str = ""
    runtime_s: float | None = None


@dataclass
class SuiteReport:
    suite: str
    seed: int
    config: dict
    cases: list

    @property
    def total(self) -> int:
        return len(self.cases)

    @property
    def passed(self) -> int:
        return sum(1 for c in self.cases if c.passed)

    @property
    def failed(self) -> int:
        return self.total - self.passed

    def all_passed(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "config": self.config,
            "cases": [asdict(c) for c in self.cases],
            "summary": {"total": self.total, "passed": self.passed,
                        "failed": self.failed},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteReport":
        cases = [CaseRecord(**{k: v for k, v in c.items()})
                 for c in data["cases"]]
        return cls(data["suite"], data["seed"], data["config"], cases)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1,
                          default=_json_default) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in self.cases:
            row = asdict(c)
            row["inputs"] = json.dumps(row["inputs"], sort_keys=True,
                                       default=_json_default)
            writer.writerow([_csv_cell(row[k]) for k in CSV_COLUMNS])
        return buf.getvalue()


def _json_default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "item"):
        return obj.item()
    return str(obj)


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def export_report(report: SuiteReport, fmt: str, path: str) -> str:
    """Write the report atomically (temp file + rename); returns the path."""
    fmt = fmt.lower()
    if fmt == "json":
        payload = report.to_json()
    elif fmt == "csv":
        payload = report.to_csv()
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
