"""PAR-2 scoring and relative speedup."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable


@dataclass(frozen=True)
class Par2Report:
    timeout: float
    tau: dict = field(default_factory=dict)  # instance id -> penalised time
    par2: float = 0.0
    solved: int = 0

    def to_json(self) -> dict:
        return {"timeout": self.timeout, "par2": self.par2, "solved": self.solved,
                "tau": dict(self.tau)}


def _time_of(item):
    """(id, time or None) for a RunRecord, a bare number, or None for a failure."""
    if item is None:
        return None, None
    if isinstance(item, (int, float)):
        return None, float(item)
    ok = item.status in ("SAT", "UNSAT")
    return item.instance, (item.cost if ok else None)


def penalised(t: float | None, timeout: float) -> float:
    if t is None or t > timeout:
        return 2.0 * timeout
    return t


def par2(records: Iterable, timeout: float) -> Par2Report:
    """Mean penalised runtime; timeouts and failures count as twice the bound.

    ``records`` holds RunRecords, plain runtimes, or ``None`` for a failure.
    """
    if timeout <= 0:
        raise ValueError("timeout must be positive")
    tau = {}
    solved = 0
    for i, item in enumerate(records):
        key, t = _time_of(item)
        key = key if key is not None else str(i)
        if key in tau:
            raise ValueError(f"duplicate instance id {key!r}")
        tau[key] = penalised(t, timeout)
        if t is not None and t <= timeout:
            solved += 1
    if not tau:
        raise ValueError("par2 of an empty record set")
    total = 0.0
    for k in sorted(tau):
        total += tau[k]
    return Par2Report(timeout, tau, total / len(tau), solved)


def speedup(v_a: float, v_b: float) -> float:
    """Relative improvement of ``b`` over ``a``: (v_a - v_b) / max(v_a, v_b)."""
    m = max(v_a, v_b)
    if m == 0:
        raise ZeroDivisionError("speedup undefined when both values are zero")
    return (v_a - v_b) / m
