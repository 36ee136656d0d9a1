"""The state surface heuristics are allowed to see and touch.

``FIELDS``, ``ARRAYS`` and ``CALLS`` are the single capability table: the
live :class:`SolverView`, the test-side :class:`SnapshotView` and the DSL
checker are all derived from it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

CONDITION = "condition"
FUNCTION = "function"
VAR_BUMP = "var_bump"
CLA_BUMP = "cla_bump"
KINDS = (CONDITION, FUNCTION, VAR_BUMP, CLA_BUMP)

# Paper table order: index i (1-based) of the slot is SLOTS.index(name) + 1.
SLOTS = (
    "rephase_condition",
    "rephase_function",
    "reduce_condition",
    "restart_condition",
    "restart_function",
    "var_bump_activity",
    "cla_bump_activity",
)

SLOT_KIND = {
    "rephase_condition": CONDITION,
    "rephase_function": FUNCTION,
    "reduce_condition": CONDITION,
    "restart_condition": CONDITION,
    "restart_function": FUNCTION,
    "var_bump_activity": VAR_BUMP,
    "cla_bump_activity": CLA_BUMP,
}

# (name, type) of the formal parameters each slot receives.
SLOT_PARAMS = {
    "rephase_condition": (),
    "rephase_function": (),
    "reduce_condition": (),
    "restart_condition": (),
    "restart_function": (),
    "var_bump_activity": (("v", "int"), ("inc", "real")),
    "cla_bump_activity": (("c", "int"),),
}


def slot_index(slot: str) -> int:
    return SLOTS.index(slot) + 1


def slot_by_index(i: int) -> str:
    if not 1 <= i <= len(SLOTS):
        raise ValueError(f"slot index {i} outside 1..{len(SLOTS)}")
    return SLOTS[i - 1]


@dataclass(frozen=True)
class FieldSpec:
    type: str
    writable_in: frozenset = frozenset()


@dataclass(frozen=True)
class ArraySpec:
    type: str
    domain: str  # "var" or "learnt"
    writable_in: frozenset = frozenset()


@dataclass(frozen=True)
class CallSpec:
    args: tuple
    returns: str
    allowed_in: frozenset = frozenset(KINDS)


_R = frozenset()
_F = frozenset({FUNCTION})
_CF = frozenset({CONDITION, FUNCTION})

FIELDS: dict[str, FieldSpec] = {
    "conflicts": FieldSpec("int"),
    "decisions": FieldSpec("int"),
    "propagations": FieldSpec("int"),
    "restarts": FieldSpec("int"),
    "trail_size": FieldSpec("int"),
    "decision_level": FieldSpec("int"),
    "num_vars": FieldSpec("int"),
    "num_clauses": FieldSpec("int"),
    "learnts_size": FieldSpec("int"),
    "max_learnts": FieldSpec("real"),
    "garbage_frac": FieldSpec("real"),
    "wasted_bytes": FieldSpec("int"),
    "arena_bytes": FieldSpec("int"),
    "restart_first": FieldSpec("int"),
    "lbd_queue_size": FieldSpec("int", _F),
    "lbd_queue_pos": FieldSpec("int", _F),
    "fast_lbd_sum": FieldSpec("real", _F),
    "slow_lbd_sum": FieldSpec("real", _F),
    "var_inc": FieldSpec("real", frozenset({VAR_BUMP})),
    "cla_inc": FieldSpec("real", frozenset({CLA_BUMP})),
    "rephases": FieldSpec("int", _CF),
    "rephase_count": FieldSpec("int", _CF),
    "rephase_limit": FieldSpec("int", _CF),
    "threshold": FieldSpec("int", _CF),
    "last_rephase_progress": FieldSpec("real", _CF),
    "last_restart_progress": FieldSpec("real", _CF),
    "curr_restarts": FieldSpec("int", _CF),
    "conflictR": FieldSpec("int", _CF),
    "fast_avg": FieldSpec("real", _CF),
    "slow_avg": FieldSpec("real", _CF),
    "restart_count": FieldSpec("int", _CF),
}

ARRAYS: dict[str, ArraySpec] = {
    "activity": ArraySpec("real", "var", frozenset({VAR_BUMP})),
    "polarity": ArraySpec("bool", "var", _F),
    "local_best": ArraySpec("bool", "var", _F),
    "saved": ArraySpec("bool", "var", _F),
    "user_pol": ArraySpec("int", "var", _F),  # -1 undefined, 0 false, 1 true
    "cla_activity": ArraySpec("real", "learnt", frozenset({CLA_BUMP})),
}

CALLS: dict[str, CallSpec] = {
    "progress_estimate": CallSpec((), "real"),
    "rand01": CallSpec((), "real"),
    "in_heap": CallSpec(("int",), "bool"),
    "heap_top": CallSpec((), "int"),
    "value": CallSpec(("int",), "int"),
    "is_decision": CallSpec(("int",), "bool"),
    "cancel_until": CallSpec(("int",), "void", _F),
    "reduce_db": CallSpec((), "void", _F),
    "rebuild_order_heap": CallSpec((), "void", _F),
    "heap_update": CallSpec(("int",), "void", frozenset({VAR_BUMP})),
    "heap_insert": CallSpec(("int",), "void", frozenset({VAR_BUMP})),
}

# Calls that change solver state or consume randomness.
IMPURE_CALLS = frozenset({"rand01", "cancel_until", "reduce_db", "rebuild_order_heap",
                          "heap_update", "heap_insert"})

_DERIVED = {
    "trail_size": lambda s: len(s.trail),
    "decision_level": lambda s: len(s.trail_lim),
    "learnts_size": lambda s: len(s.learnts),
}


class _LearntActivities:
    """List-like access to learnt clause activities by store position."""

    __slots__ = ("_learnts",)

    def __init__(self, learnts):
        self._learnts = learnts

    def __len__(self):
        return len(self._learnts)

    def __getitem__(self, i):
        return self._learnts[i].activity

    def __setitem__(self, i, value):
        self._learnts[i].activity = value


class SolverView:
    """Live view over a :class:`modsat.solver.Solver`; the only handle hooks receive."""

    __slots__ = ("_s",)

    def __init__(self, solver):
        self._s = solver

    @property
    def cla_activity(self):
        return _LearntActivities(self._s.learnts)

    def progress_estimate(self) -> float:
        return self._s.progress_estimate()

    def rand01(self) -> float:
        return self._s.rng.random()

    def in_heap(self, v: int) -> bool:
        return v in self._s.order_heap

    def heap_top(self) -> int:
        return self._s.order_heap.top()

    def value(self, v: int) -> int:
        return self._s.var_value(v)

    def is_decision(self, v: int) -> bool:
        return True

    def cancel_until(self, level: int) -> None:
        self._s.cancel_until(max(0, int(level)))

    def reduce_db(self) -> None:
        self._s.reduce_db()

    def rebuild_order_heap(self) -> None:
        self._s.rebuild_order_heap()

    def heap_update(self, v: int) -> None:
        self._s.order_heap.update(v)

    def heap_insert(self, v: int) -> None:
        self._s.order_heap.insert(v)


def _install_properties():
    for name, spec in FIELDS.items():
        if name in _DERIVED:
            getter = _DERIVED[name]
            setattr(SolverView, name, property(lambda self, g=getter: g(self._s)))
        elif spec.writable_in and spec.type == "real":
            setattr(SolverView, name, property(
                lambda self, n=name: getattr(self._s, n),
                lambda self, value, n=name: setattr(self._s, n, float(value))))
        elif spec.writable_in:
            setattr(SolverView, name, property(
                lambda self, n=name: getattr(self._s, n),
                lambda self, value, n=name: setattr(self._s, n, value)))
        else:
            setattr(SolverView, name, property(lambda self, n=name: getattr(self._s, n)))
    for name in ARRAYS:
        if name != "cla_activity":
            setattr(SolverView, name, property(lambda self, n=name: getattr(self._s, n)))


_install_properties()


class SnapshotView:
    """Detached stand-in for a solver: plain fields plus a log of effect calls.

    Used to run hooks on synthetic states and to compare two implementations
    of the same heuristic effect by effect.
    """

    def __init__(self, fields: dict, arrays: dict, *, heap: set | None = None,
                 heap_top: int = 0, values: list | None = None, progress: float = 0.0,
                 seed: int = 0):
        for name in FIELDS:
            setattr(self, name, fields.get(name, 0))
        for name in ARRAYS:
            setattr(self, name, list(arrays.get(name, ())))
        self.heap = set(heap or ())
        self._heap_top = heap_top
        self.values = list(values) if values is not None else [-1] * self.num_vars
        self.progress = progress
        self.rng = random.Random(seed)
        self.effects: list[tuple] = []

    def state(self) -> dict:
        out = {name: getattr(self, name) for name in FIELDS}
        out.update({name: list(getattr(self, name)) for name in ARRAYS})
        out["heap"] = sorted(self.heap)
        out["effects"] = list(self.effects)
        return out

    def progress_estimate(self) -> float:
        return self.progress

    def rand01(self) -> float:
        return self.rng.random()

    def in_heap(self, v: int) -> bool:
        return v in self.heap

    def heap_top(self) -> int:
        return self._heap_top

    def value(self, v: int) -> int:
        return self.values[v]

    def is_decision(self, v: int) -> bool:
        return True

    def cancel_until(self, level: int) -> None:
        self.effects.append(("cancel_until", level))
        if level < self.decision_level:
            self.decision_level = level

    def reduce_db(self) -> None:
        self.effects.append(("reduce_db",))

    def rebuild_order_heap(self) -> None:
        self.effects.append(("rebuild_order_heap",))

    def heap_update(self, v: int) -> None:
        self.effects.append(("heap_update", v))

    def heap_insert(self, v: int) -> None:
        self.effects.append(("heap_insert", v))
        self.heap.add(v)
