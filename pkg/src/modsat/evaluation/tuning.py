"""Random search over the solver parameter space."""
from __future__ import annotations

import random
from dataclasses import replace
from typing import Callable, Optional

from ..solver import SolverConfig

# name -> (kind, low, high, bounds); bounds "()" open, "[]" closed.
SPACE = {
    "var_decay": ("real", 0.0, 1.0, "()"),
    "cla_decay": ("real", 0.0, 1.0, "()"),
    "rnd_freq": ("real", 0.0, 1.0, "[]"),
    "rnd_init": ("bool", 0, 1, "[]"),
    "rfirst": ("int", 1, 10_000, "[]"),
    "rinc": ("real", 1.5, 4.0, "()"),
    "gc_frac": ("real", 0.0, 1.0, "()"),
    "min_learnts": ("int", 0, 1_000_000, "[]"),
}


def _sample(rng: random.Random, kind, lo, hi, bounds):
    if kind == "bool":
        return rng.random() < 0.5
    if kind == "int":
        return rng.randint(lo, hi)
    while True:
        x = rng.uniform(lo, hi)
        if bounds == "[]" or lo < x < hi:
            return x


def sample_config(rng: random.Random, base: SolverConfig | None = None) -> SolverConfig:
    base = base or SolverConfig()
    values = {name: _sample(rng, *spec) for name, spec in SPACE.items()}
    return replace(base, **values)


def tune_random(objective: Callable[[SolverConfig], float], budget: int, seed: int = 0,
                base: SolverConfig | None = None,
                history: Optional[list] = None) -> SolverConfig:
    """Sample ``budget`` configurations uniformly; return the one with the lowest objective.

    Ties keep the earlier sample. ``history`` (if given) receives
    ``(config, score)`` pairs in sampling order.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    rng = random.Random(seed)
    best, best_score = None, None
    for _ in range(budget):
        cfg = sample_config(rng, base)
        score = objective(cfg)
        if history is not None:
            history.append((cfg, score))
        if best_score is None or score < best_score:
            best, best_score = cfg, score
    return best


def par2_objective(instances, suite, timeout, *, jobs=1, clock="wall"):
    """Objective that scores a configuration by PAR-2 on ``instances``."""
    from .harness import evaluate_suite

    def objective(cfg: SolverConfig) -> float:
        report, _ = evaluate_suite(instances, suite, cfg, timeout, jobs=jobs, clock=clock)
        return report.par2
    return objective
