from __future__ import annotations

from .presets import DISCOVERED, PRESETS, baseline_id, presets_for
from .suite import DslStrategy, HeuristicSuite, HookFault, NativePreset
from .view import SLOT_KIND, SLOTS, SnapshotView, SolverView, slot_by_index, slot_index

__all__ = [
    "DISCOVERED", "PRESETS", "SLOTS", "SLOT_KIND", "DslStrategy", "HeuristicSuite", "HookFault",
    "NativePreset", "SnapshotView", "SolverView", "baseline_id", "presets_for", "slot_by_index",
    "slot_index",
]
