"""Timed solver runs over single instances and whole datasets."""
from __future__ import annotations

import hashlib
import json
import subprocess
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from ..cnf import Formula, parse_dimacs, write_dimacs
from ..hooks.suite import HeuristicSuite, HookFault
from ..solver import UNKNOWN, SolverConfig, solve
from .metrics import Par2Report, par2

# Deterministic clock: scored seconds = propagations / WORK_RATE.
WORK_RATE = 100_000.0
WALL = "wall"
WORK = "work"


@dataclass
class RunRecord:
    instance: str
    status: str
    wall_time: float
    cost: float  # the time that is scored: wall seconds or work seconds
    stats: dict = field(default_factory=dict)
    suite_id: str = ""
    seed: int = 0
    clock: str = WALL
    fault: Optional[str] = None

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "RunRecord":
        return cls(**d)


def suite_id(suite: HeuristicSuite) -> str:
    return hashlib.sha256(suite.dumps().encode()).hexdigest()[:12]


def run_instance(f: Formula, suite: HeuristicSuite, cfg: SolverConfig | None, timeout: float,
                 *, instance: str = "", clock: str = WALL) -> RunRecord:
    """Solve ``f`` under a cutoff; faults and timeouts come back as UNKNOWN."""
    if timeout <= 0:
        raise ValueError("timeout must be positive")
    cfg = cfg or SolverConfig()
    if clock == WALL:
        run_cfg = replace(cfg, timeout=timeout)
    elif clock == WORK:
        run_cfg = replace(cfg, timeout=None, work_limit=max(1, int(timeout * WORK_RATE)))
    else:
        raise ValueError(f"unknown clock {clock!r}")
    sid = suite_id(suite)
    start = time.perf_counter()
    try:
        result = solve(f, suite, run_cfg)
    except HookFault as exc:
        wall = time.perf_counter() - start
        return RunRecord(instance, UNKNOWN, wall, 2.0 * timeout, {}, sid, cfg.seed, clock,
                         fault=str(exc))
    wall = time.perf_counter() - start
    if clock == WALL:
        cost = result.wall_time
    else:
        cost = result.stats["propagations"] / WORK_RATE
    if result.status == UNKNOWN:
        cost = 2.0 * timeout
    return RunRecord(instance, result.status, wall, cost, result.stats, sid, cfg.seed, clock)


def _run_payload(payload: dict) -> dict:
    f = parse_dimacs(payload["dimacs"])
    suite = HeuristicSuite.from_json(payload["suite"])
    cfg = SolverConfig(**payload["cfg"])
    rec = run_instance(f, suite, cfg, payload["timeout"], instance=payload["instance"],
                       clock=payload["clock"])
    return rec.to_json()


def run_instance_subprocess(f: Formula, suite: HeuristicSuite, cfg: SolverConfig | None,
                            timeout: float, *, instance: str = "") -> RunRecord:
    """Wall-clock run in a child process, killed hard at 110% of the timeout."""
    cfg = cfg or SolverConfig()
    payload = {"dimacs": write_dimacs(f), "suite": suite.to_json(), "cfg": cfg.to_json(),
               "timeout": timeout, "instance": instance, "clock": WALL}
    start = time.perf_counter()
    try:
        proc = subprocess.run([sys.executable, "-m", "modsat.evaluation.harness"],
                              input=json.dumps(payload), capture_output=True, text=True,
                              timeout=timeout * 1.1)
    except subprocess.TimeoutExpired:
        wall = time.perf_counter() - start
        return RunRecord(instance, UNKNOWN, wall, 2.0 * timeout, {}, suite_id(suite), cfg.seed,
                         WALL, fault="killed at hard limit")
    if proc.returncode != 0:
        wall = time.perf_counter() - start
        return RunRecord(instance, UNKNOWN, wall, 2.0 * timeout, {}, suite_id(suite), cfg.seed,
                         WALL, fault=proc.stderr.strip()[-500:] or f"exit {proc.returncode}")
    return RunRecord.from_json(json.loads(proc.stdout))


def _dataset_job(args):
    instance, dimacs, suite_json, cfg_json, timeout, clock = args
    return _run_payload({"dimacs": dimacs, "suite": suite_json, "cfg": cfg_json,
                         "timeout": timeout, "instance": instance, "clock": clock})


def run_dataset(instances: Sequence[tuple[str, Formula]], suite: HeuristicSuite,
                cfg: SolverConfig | None, timeout: float, *, jobs: int = 1,
                clock: str = WALL) -> list[RunRecord]:
    """Run every instance; records come back sorted by instance id whatever ``jobs`` is."""
    cfg = cfg or SolverConfig()
    if jobs <= 1:
        records = [run_instance(f, suite, cfg, timeout, instance=iid, clock=clock)
                   for iid, f in instances]
    else:
        tasks = [(iid, write_dimacs(f), suite.to_json(), cfg.to_json(), timeout, clock)
                 for iid, f in instances]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = [RunRecord.from_json(d) for d in pool.map(_dataset_job, tasks)]
    return sorted(records, key=lambda r: r.instance)


def evaluate_suite(instances, suite, cfg, timeout, *, jobs=1, clock=WALL) -> tuple[Par2Report, list]:
    records = run_dataset(instances, suite, cfg, timeout, jobs=jobs, clock=clock)
    return par2(records, timeout), records


def load_formula(path: str | Path) -> Formula:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read instance {path}: {exc}") from exc
    return parse_dimacs(text)


def _main() -> int:
    payload = json.loads(sys.stdin.read())
    print(json.dumps(_run_payload(payload)))
    return 0


if __name__ == "__main__":
    raise SystemExit(_main())
