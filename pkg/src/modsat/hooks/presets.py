"""Native heuristic presets: the original ModSAT hooks and the discovered variants.

Integer fields follow C semantics (truncating conversion and division) so the
presets behave like the C++ they were written in.
"""
from __future__ import annotations

from typing import Callable


def c_int(x: float) -> int:
    """C-style conversion to int (truncation toward zero)."""
    return int(x)


def c_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


# -- restart -----------------------------------------------------------------

def restart_condition_baseline(view) -> bool:
    if view.conflicts == 0:
        return False
    return (view.lbd_queue_size == 50
            and 0.8 * view.fast_lbd_sum / view.lbd_queue_size > view.slow_lbd_sum / view.conflicts)


def restart_condition_lbd_adaptive(view) -> bool:
    if view.conflicts <= 0:
        return False
    if view.lbd_queue_size > 0:
        avg_lbd = view.fast_lbd_sum / view.lbd_queue_size
        conflict_rate = float(view.conflictR) / float(view.conflicts)
        restart_threshold = view.restart_first * (0.8 + 0.4 * avg_lbd) * (1.0 + 0.5 * conflict_rate)
        if view.progress_estimate() - view.last_rephase_progress < 0.01:
            restart_threshold *= 0.7
    else:
        restart_threshold = view.restart_first
    if view.conflictR >= restart_threshold:
        view.conflictR = 0
        return True
    return False


def restart_function_baseline(view) -> None:
    view.fast_lbd_sum = 0
    view.lbd_queue_size = 0
    view.lbd_queue_pos = 0
    view.cancel_until(0)


def restart_function_lbd_moving_average(view) -> None:
    if view.lbd_queue_size > 0:
        curr_fast = view.fast_lbd_sum / view.lbd_queue_size
        view.fast_avg = 0.9 * view.fast_avg + 0.1 * curr_fast
        view.slow_avg = 0.99 * view.slow_avg + 0.01 * curr_fast
    restart_level = 0
    if view.fast_avg > 0 and view.slow_avg > 0:
        ratio = view.fast_avg / view.slow_avg
        if ratio > 1.2:
            restart_level = 0
        elif ratio > 1.0:
            restart_level = max(0, c_div(view.decision_level, 2))
        else:
            restart_level = max(0, view.decision_level - 1)
    view.fast_lbd_sum = 0
    view.lbd_queue_size = 0
    view.lbd_queue_pos = 0
    view.cancel_until(restart_level)
    count = view.restart_count
    view.restart_count = count + 1
    if count % 16 == 15:
        view.reduce_db()
    view.rebuild_order_heap()


# -- rephase -----------------------------------------------------------------

def rephase_condition_baseline(view) -> bool:
    return view.rephases >= view.rephase_limit


def rephase_condition_progress_adaptive(view) -> bool:
    base_rephase_limit = 1024
    progress_factor = 0.02
    if view.conflictR < view.rephase_limit:
        return False
    progress = c_int(view.trail_size - view.last_rephase_progress)
    progress_threshold = max(50, c_int(view.num_vars * progress_factor))
    if progress < progress_threshold:
        view.rephase_limit = max(base_rephase_limit, c_div(view.rephase_limit * 2, 3))
    else:
        view.rephase_limit = min(base_rephase_limit * 16, c_div(view.rephase_limit * 3, 2))
    return True


def rephase_function_baseline(view) -> None:
    n = view.num_vars
    view.conflictR = 0
    view.rephases = 0
    view.threshold = c_int(view.threshold * 0.9)
    view.rephase_limit += 8192
    polarity, local_best, saved = view.polarity, view.local_best, view.saved
    phase_rand = c_int(view.rand01() * 100)
    phase_rand -= 40
    if phase_rand < 0:
        for i in range(n):
            polarity[i] = local_best[i]
        return
    phase_rand -= 25
    if phase_rand < 0:
        for i in range(n):
            polarity[i] = not local_best[i]
        return
    phase_rand -= 15
    if phase_rand < 0:
        for i in range(n):
            polarity[i] = not polarity[i]
        return
    for i in range(n):
        polarity[i] = saved[i]


def rephase_function_weighted_policies(view) -> None:
    if view.rephases > 0 and view.conflictR > view.last_rephase_progress:
        view.rephase_limit = c_int(view.rephase_limit * 1.5)
    else:
        view.rephase_limit = c_int(view.rephase_limit * 0.9)
        if view.rephase_limit < 512:
            view.rephase_limit = 512
    view.last_rephase_progress = float(view.conflictR)
    view.rephase_count += 1
    n = view.num_vars
    polarity = view.polarity
    rand_val = view.rand01()
    if rand_val < 0.4:
        local_best = view.local_best
        for v in range(n):
            polarity[v] = local_best[v]
    elif rand_val < 0.7:
        for v in range(n):
            polarity[v] = not polarity[v]
    elif rand_val < 0.9:
        activity = view.activity
        activity_threshold = 0.2 * view.var_inc
        for v in range(n):
            if activity[v] < activity_threshold:
                polarity[v] = view.rand01() < 0.5
    else:
        user_pol = view.user_pol
        for v in range(n):
            if user_pol[v] != -1:
                polarity[v] = user_pol[v] == 1
    view.threshold = c_int(view.trail_size * 0.8)
    view.cancel_until(0)


# -- reduce ------------------------------------------------------------------

def reduce_condition_baseline(view) -> bool:
    return view.learnts_size >= view.max_learnts


def reduce_condition_memory_aware(view) -> bool:
    if view.learnts_size >= view.max_learnts:
        return True
    if view.wasted_bytes > view.arena_bytes * view.garbage_frac * 0.8:
        return True
    if view.learnts_size > 0 and view.learnts_size > 2 * view.num_clauses:
        return True
    if view.conflictR > 1000 and view.learnts_size > view.max_learnts * 0.8:
        return True
    return False


# -- activity bumps ----------------------------------------------------------

def var_bump_activity_baseline(view, v: int, inc: float) -> None:
    activity = view.activity
    activity[v] += inc
    if activity[v] > 1e50:
        for i in range(view.num_vars):
            activity[i] *= 1e-50
        view.var_inc *= 1e-50
    if view.in_heap(v):
        view.heap_update(v)


def var_bump_activity_level_scaled(view, v: int, inc: float) -> None:
    activity = view.activity
    scaled_inc = inc * (1.0 + 0.1 * view.decision_level)
    activity[v] += scaled_inc
    if activity[v] > 1e100:
        scale_factor = 1e-100
        for i in range(view.num_vars):
            activity[i] *= scale_factor
            if activity[i] < 1e-100:
                activity[i] = 1e-100
        view.var_inc *= scale_factor
    if view.in_heap(v):
        if activity[v] > activity[view.heap_top()]:
            view.heap_update(v)
    elif view.is_decision(v) and view.value(v) == -1:
        view.heap_insert(v)


def cla_bump_activity_baseline(view, c: int) -> None:
    acts = view.cla_activity
    acts[c] += view.cla_inc
    if acts[c] > 1e20:
        for i in range(view.learnts_size):
            acts[i] *= 1e-20
        view.cla_inc *= 1e-20


def cla_bump_activity_floored(view, c: int) -> None:
    acts = view.cla_activity
    acts[c] += view.cla_inc
    if acts[c] > 1e20:
        scale_factor = 1e-20
        min_activity = 1e-20
        for i in range(view.learnts_size):
            acts[i] *= scale_factor
            if acts[i] < min_activity:
                acts[i] = min_activity
        view.cla_inc *= scale_factor
        if view.cla_inc < min_activity:
            view.cla_inc = min_activity
    if view.conflicts > 1000 and view.lbd_queue_size > 50:
        conflict_scale = 1.0 - 0.01 * (view.lbd_queue_size / 50.0)
        view.cla_inc *= conflict_scale if conflict_scale > 0.8 else 0.8


# Registry ids are "<slot>/<variant>"; every slot has "baseline".
PRESETS: dict[str, Callable] = {
    "restart_condition/baseline": restart_condition_baseline,
    "restart_condition/lbd-adaptive": restart_condition_lbd_adaptive,
    "restart_function/baseline": restart_function_baseline,
    "restart_function/lbd-moving-average": restart_function_lbd_moving_average,
    "rephase_condition/baseline": rephase_condition_baseline,
    "rephase_condition/progress-adaptive": rephase_condition_progress_adaptive,
    "rephase_function/baseline": rephase_function_baseline,
    "rephase_function/weighted-policies": rephase_function_weighted_policies,
    "reduce_condition/baseline": reduce_condition_baseline,
    "reduce_condition/memory-aware": reduce_condition_memory_aware,
    "var_bump_activity/baseline": var_bump_activity_baseline,
    "var_bump_activity/level-scaled": var_bump_activity_level_scaled,
    "cla_bump_activity/baseline": cla_bump_activity_baseline,
    "cla_bump_activity/floored": cla_bump_activity_floored,
}

DISCOVERED = {
    "restart_condition": "restart_condition/lbd-adaptive",
    "restart_function": "restart_function/lbd-moving-average",
    "rephase_condition": "rephase_condition/progress-adaptive",
    "rephase_function": "rephase_function/weighted-policies",
    "reduce_condition": "reduce_condition/memory-aware",
    "var_bump_activity": "var_bump_activity/level-scaled",
    "cla_bump_activity": "cla_bump_activity/floored",
}


def baseline_id(slot: str) -> str:
    return f"{slot}/baseline"


def presets_for(slot: str) -> list[str]:
    return [k for k in PRESETS if k.split("/", 1)[0] == slot]
