"""Persistent run reports: JSON lines per record plus a summary document."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .harness import RunRecord
from .metrics import Par2Report, par2

SCHEMA_VERSION = 1


def append_records(path: str | Path, records: Iterable[RunRecord]) -> None:
    with open(path, "a") as fh:
        for r in records:
            fh.write(json.dumps({"schema": SCHEMA_VERSION, **r.to_json()}, sort_keys=True) + "\n")


def read_records(path: str | Path) -> list[RunRecord]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            schema = d.pop("schema", SCHEMA_VERSION)
            if schema != SCHEMA_VERSION:
                raise ValueError(f"unsupported report schema {schema}")
            out.append(RunRecord.from_json(d))
    return out


def summary(records: list[RunRecord], timeout: float, **extra) -> dict:
    report = par2(records, timeout)
    statuses = {}
    for r in records:
        statuses[r.status] = statuses.get(r.status, 0) + 1
    return {"schema": SCHEMA_VERSION, **report.to_json(), "instances": len(records),
            "statuses": statuses, **extra}


def write_report(out: str | Path, records: list[RunRecord], timeout: float, **extra) -> Par2Report:
    """Write ``<out>.jsonl`` and ``<out>.summary.json``; returns the PAR-2 report."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    jsonl = out.with_suffix(".jsonl")
    jsonl.write_text("")
    append_records(jsonl, records)
    summ = summary(records, timeout, **extra)
    out.with_suffix(".summary.json").write_text(json.dumps(summ, indent=2, sort_keys=True) + "\n")
    return par2(records, timeout)


def cactus(records: Iterable[RunRecord], timeout: float | None = None) -> list[tuple[int, float]]:
    """(number solved, time) points: solved runtimes sorted ascending."""
    times = sorted(r.cost for r in records if r.status in ("SAT", "UNSAT")
                   and (timeout is None or r.cost <= timeout))
    return [(i + 1, t) for i, t in enumerate(times)]


def cactus_table(series: dict[str, list[RunRecord]], timeout: float | None = None) -> str:
    """Tab separated ``label  solved  time`` rows for plotting."""
    lines = ["label\tsolved\ttime"]
    for label in sorted(series):
        for k, t in cactus(series[label], timeout):
            lines.append(f"{label}\t{k}\t{t:.6f}")
    return "\n".join(lines) + "\n"
