"""A heuristic suite: one strategy per hook slot."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Union

from .presets import DISCOVERED, PRESETS, baseline_id
from .view import SLOTS


class HookFault(RuntimeError):
    """A hook failed while the solver was running."""

    def __init__(self, slot: str, detail: str):
        self.slot = slot
        self.detail = detail
        super().__init__(f"hook {slot} failed: {detail}")


@dataclass(frozen=True)
class NativePreset:
    id: str

    def __post_init__(self):
        if self.id not in PRESETS:
            raise KeyError(f"unknown preset {self.id!r}")

    def to_json(self) -> dict:
        return {"kind": "native", "id": self.id}


@dataclass(frozen=True)
class DslStrategy:
    source: str

    def to_json(self) -> dict:
        return {"kind": "dsl", "source": self.source}


Strategy = Union[NativePreset, DslStrategy]


def strategy_from_json(d: dict) -> Strategy:
    kind = d.get("kind")
    if kind == "native":
        return NativePreset(d["id"])
    if kind == "dsl":
        return DslStrategy(d["source"])
    raise ValueError(f"unknown strategy kind {kind!r}")


def _compile(slot: str, strategy: Strategy) -> Callable:
    if isinstance(strategy, NativePreset):
        if strategy.id.split("/", 1)[0] != slot:
            raise ValueError(f"preset {strategy.id!r} does not belong to slot {slot!r}")
        return PRESETS[strategy.id]
    from ..dsl import compile_source  # deferred: the DSL imports hooks.view

    return compile_source(strategy.source, slot)


@dataclass(frozen=True)
class HeuristicSuite:
    rephase_condition: Strategy
    rephase_function: Strategy
    reduce_condition: Strategy
    restart_condition: Strategy
    restart_function: Strategy
    var_bump_activity: Strategy
    cla_bump_activity: Strategy

    @classmethod
    def baseline(cls) -> "HeuristicSuite":
        return cls(**{s: NativePreset(baseline_id(s)) for s in SLOTS})

    @classmethod
    def discovered(cls) -> "HeuristicSuite":
        return cls(**{s: NativePreset(DISCOVERED[s]) for s in SLOTS})

    def get(self, slot: str) -> Strategy:
        if slot not in SLOTS:
            raise KeyError(slot)
        return getattr(self, slot)

    def replace(self, slot: str, strategy: Strategy) -> "HeuristicSuite":
        if slot not in SLOTS:
            raise KeyError(slot)
        d = self.as_dict()
        d[slot] = strategy
        return HeuristicSuite(**d)

    def as_dict(self) -> dict:
        return {s: getattr(self, s) for s in SLOTS}

    def to_json(self) -> dict:
        return {s: getattr(self, s).to_json() for s in SLOTS}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, d: dict) -> "HeuristicSuite":
        missing = [s for s in SLOTS if s not in d]
        if missing:
            raise ValueError(f"suite is missing slots: {', '.join(missing)}")
        return cls(**{s: strategy_from_json(d[s]) for s in SLOTS})

    @classmethod
    def loads(cls, text: str) -> "HeuristicSuite":
        return cls.from_json(json.loads(text))

    def bind(self) -> dict[str, Callable]:
        """Compile every slot to a callable taking ``(view, *args)``."""
        return {s: _compile(s, getattr(self, s)) for s in SLOTS}

    def describe(self) -> dict[str, str]:
        out = {}
        for s in SLOTS:
            st = getattr(self, s)
            out[s] = st.id if isinstance(st, NativePreset) else "dsl"
        return out
