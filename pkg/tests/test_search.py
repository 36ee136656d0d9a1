from __future__ import annotations

import math
import random
from collections import Counter

import pytest

from modsat.dsl import DslError, extract_marked, transcription
from modsat.evaluation.generators import random_3sat
from modsat.hooks import (DISCOVERED, SLOTS, DslStrategy, HeuristicSuite, NativePreset,
                          baseline_id, slot_by_index, slot_index)
from modsat.llm import LLMError, MockClient
from modsat.prompts import CODER_SYSTEM
from modsat.search import (JUDGE_SYSTEM, REPAIR_SYSTEM, DatasetEvaluator, LLMGenerator,
                           SearchState, as_strategy, compact_subset, conditional_binomial_pmf,
                           discover, evolve, initial_suite, preset_generator, presearch,
                           sample_modification_count, strategy_source)


def is_discovered(suite, slot):
    st = suite.get(slot)
    return isinstance(st, NativePreset) and st.id == DISCOVERED[slot]


class Scripted:
    """PAR-2 = base + sum of per-slot effects of the discovered variant being in place."""

    def __init__(self, effects: dict[int, float], base: float = 100.0):
        self.effects = effects
        self.base = base
        self.calls = []

    def __call__(self, suite, instances):
        self.calls.append((suite, list(instances)))
        return self.base + sum(e for i, e in self.effects.items()
                               if is_discovered(suite, slot_by_index(i)))


# -- presearch ---------------------------------------------------------------

def test_compact_subset_sizes_and_determinism():
    for n in range(1, 12):
        items = list(range(n))
        sub = compact_subset(items, seed=3)
        assert len(sub) == math.ceil(n / 2) and len(set(sub)) == len(sub)
        assert sub == compact_subset(items, seed=3)


def test_presearch_keeps_the_beneficial_hooks():
    effects = {1: 4.0, 2: -7.0, 3: 2.0, 4: -3.0, 5: -5.0, 6: 1.0, 7: -2.0}
    ev = Scripted(effects)
    instances = [f"i{k}" for k in range(9)]
    scores = {}
    retained = presearch(instances, ev, HeuristicSuite.discovered(), seed=1, scores=scores)
    assert retained == (2, 4, 5, 7)
    assert len(ev.calls) == 7 and all(len(c[1]) == 5 for c in ev.calls)
    for i, (suite, _) in enumerate(ev.calls, start=1):
        reverted = [s for s in SLOTS if not is_discovered(suite, s)]
        assert reverted == [slot_by_index(i)]
    total = sum(effects.values())
    assert scores == {i: 100.0 + total - e for i, e in effects.items()}


def test_presearch_ties_prefer_lower_index_and_failures_raise():
    flat = lambda suite, inst: 1.0
    assert presearch([1, 2, 3], flat, HeuristicSuite.discovered()) == (1, 2, 3, 4)
    with pytest.raises(RuntimeError):
        presearch([1, 2], lambda s, i: math.inf, HeuristicSuite.discovered())
    with pytest.raises(ValueError):
        presearch([1], flat, HeuristicSuite.discovered())


# -- (1+λ) evolution ---------------------------------------------------------

def test_conditional_binomial_closed_form():
    assert math.isclose(conditional_binomial_pmf(4, 1), 0.421875 / 0.68359375)
    assert math.isclose(sum(conditional_binomial_pmf(4, k) for k in range(1, 5)), 1.0)
    assert conditional_binomial_pmf(1, 1) == 1.0


def test_modification_count_distribution():
    rng = random.Random(11)
    counts = Counter(sample_modification_count(rng, 4) for _ in range(100_000))
    assert 0 not in counts and max(counts) <= 4
    for k in range(1, 5):
        assert abs(counts[k] / 100_000 - conditional_binomial_pmf(4, k)) < 0.01
    with pytest.raises(ValueError):
        sample_modification_count(rng, 0)


def test_initial_suite_uses_full_suite_only_on_retained_hooks():
    suite = initial_suite((2, 5), HeuristicSuite.discovered())
    assert [is_discovered(suite, s) for s in SLOTS] == [False, True, False, False, True, False, False]


def test_evolve_consumes_budget_exactly_and_never_worsens():
    ev = Scripted({2: -3.0, 4: -2.0, 5: 1.0, 7: -1.0})
    gen = preset_generator()
    state = evolve(["a", "b"], (2, 4, 5, 7), gen, ev, HeuristicSuite.baseline(), budget=50, seed=3)
    assert len(ev.calls) == 51 and state.budget == 0
    trace = state.trace()
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    assert state.best == min(h["par2"] for h in state.history) == 100.0 - 6.0
    assert state.best == ev(state.incumbent, [])


def test_evolve_accepts_ties():
    ev = lambda suite, inst: 5.0
    state = evolve([1], (1, 3), preset_generator(), ev, HeuristicSuite.baseline(), budget=10, seed=0)
    offspring = [h for h in state.history if h["kind"] == "offspring"]
    assert len(offspring) == 10 and all(h["accepted"] for h in offspring)


def test_evolve_lambda_offspring_share_a_parent():
    seen = []

    def gen(parent, slot, rng):
        seen.append(parent)
        return DISCOVERED[slot]

    ev = Scripted({1: -1.0})
    state = evolve([1], (1,), gen, ev, HeuristicSuite.baseline(), lam=3, budget=7, seed=0)
    assert len(ev.calls) == 8 and state.budget == 0
    assert seen[0] is seen[1] is seen[2]


def test_generator_failures_cost_budget():
    def gen(parent, slot, rng):
        raise LLMError("down")

    ev = Scripted({})
    state = evolve([1], (1, 2), gen, ev, HeuristicSuite.baseline(), budget=5)
    assert len(ev.calls) == 1 and state.budget == 0
    assert all("LLMError" in h["error"] for h in state.history[1:])


def test_evolve_is_reproducible():
    ev1, ev2 = Scripted({2: -1.0, 4: 2.0}), Scripted({2: -1.0, 4: 2.0})
    a = evolve([1], (2, 4), preset_generator(), ev1, budget=20, seed=9)
    b = evolve([1], (2, 4), preset_generator(), ev2, budget=20, seed=9)
    assert a.to_json() == b.to_json()


def test_as_strategy_forms():
    assert as_strategy("restart_condition/baseline", "restart_condition") == NativePreset("restart_condition/baseline")
    dsl = as_strategy("// start reduce_condition\nbool reduce_condition() { return true; }\n// end reduce_condition",
                      "reduce_condition")
    assert dsl == DslStrategy("bool reduce_condition() { return true; }\n")
    with pytest.raises(ValueError):
        as_strategy("restart_condition/baseline", "reduce_condition")
    with pytest.raises(DslError):
        as_strategy("bool reduce_condition() { return x; }", "reduce_condition")
    with pytest.raises(TypeError):
        as_strategy(3, "reduce_condition")


def test_llm_generator_uses_incumbent_source():
    client = MockClient(["// start restart_condition\nbool restart_condition() { return false; }\n// end restart_condition",
                         "no code"])
    gen = LLMGenerator(client)
    suite = HeuristicSuite.baseline()
    assert gen(suite, "restart_condition") == "bool restart_condition() { return false; }\n"
    req = client.requests[0]
    assert req.system == CODER_SYSTEM and req.temperature == 0.8
    assert strategy_source(suite.get("restart_condition")).strip() in req.user
    with pytest.raises(DslError):
        gen(suite, "restart_condition")


# -- discovery ---------------------------------------------------------------

def marked(slot, body):
    return f"// start {slot}\n{body}\n// end {slot}"


BASE_RESTART = extract_marked(transcription("restart_condition/baseline"), "restart_condition")


def slot_of(req):
    for s in SLOTS:
        if f"// start {s}" in req.user:
            return s
    return None


def test_discover_synonym_retries_same_slot_without_evaluation():
    responses = [
        marked("restart_condition", "// same thing\n" + BASE_RESTART.replace("0.8 *", "(0.8) *")),
        marked("restart_condition", "bool restart_condition() { return conflictR > 50; }"),
        marked("reduce_condition", "bool reduce_condition() { return learnts_size > 10; }"),
    ]
    coder = MockClient(responses)
    scores = iter([10.0, 9.0, 11.0])
    calls = []

    def evaluate(suite, inst):
        calls.append(suite)
        return next(scores)

    state = discover([("x", random_3sat(10, seed=1))], (4, 3), coder, evaluate, max_iter=3)
    assert [h["kind"] for h in state.history] == ["initial", "synonymous", "evaluated", "evaluated"]
    assert [slot_of(r) for r in coder.requests] == ["restart_condition", "restart_condition", "reduce_condition"]
    assert len(calls) == 3 and state.best == 9.0 and state.budget == 0
    assert isinstance(state.incumbent.get("restart_condition"), DslStrategy)
    assert isinstance(state.incumbent.get("reduce_condition"), NativePreset)


def test_discover_repairs_exactly_once():
    coder = MockClient([marked("reduce_condition", "bool reduce_condition() { return nope; }"),
                        "no markers at all"])
    repairer = MockClient(["still // start reduce_condition\nbool reduce_condition() { return 1 / 0 > 0; }\n// end reduce_condition",
                           marked("reduce_condition", "bool reduce_condition() { return learnts_size > max_learnts; }")])
    evals = []
    state = discover([("x", random_3sat(12, seed=2))], (3,), coder,
                     lambda s, i: evals.append(s) or 5.0, repairer=repairer, max_iter=2)
    kinds = [h["kind"] for h in state.history]
    assert kinds == ["initial", "invalid", "evaluated"]
    assert len(repairer.requests) == 2
    assert all(r.system == REPAIR_SYSTEM and r.temperature == 0.0 for r in repairer.requests)
    assert state.history[1]["repaired"] is True
    assert any("runtime" in d or "division" in d for d in state.history[1]["diagnostics"])
    assert state.history[2]["repaired"] is True and not state.history[2]["accepted"]
    assert len(evals) == 2


def test_discover_judge_and_coder_errors():
    coder = MockClient([LLMError("timeout"),
                        marked("restart_condition", "bool restart_condition() { return conflictR > 77; }")])
    judge = MockClient(lambda req: "YES, they are equivalent")
    state = discover([("x", random_3sat(10, seed=0))], (4,), coder, lambda s, i: 1.0,
                     evaluator=judge, max_iter=2)
    assert [h["kind"] for h in state.history] == ["initial", "coder-error", "synonymous"]
    assert judge.requests and judge.requests[0].system == JUDGE_SYSTEM and judge.requests[0].temperature == 0.0


def test_discover_argument_checks():
    with pytest.raises(ValueError):
        discover([], (), MockClient([]), lambda s, i: 1.0)
    with pytest.raises(ValueError):
        discover([], (1,), MockClient([]), lambda s, i: 1.0, slot_policy="greedy")


def test_dataset_evaluator_counts_calls():
    instances = [("a", random_3sat(20, seed=1)), ("b", random_3sat(20, seed=2))]
    ev = DatasetEvaluator(1.0)
    score = ev(HeuristicSuite.baseline(), instances)
    assert ev.calls == 1 and len(ev.last_records) == 2
    assert score == sum(r.cost for r in ev.last_records) / 2


def test_search_state_serialises():
    state = SearchState((1, 2), HeuristicSuite.baseline(), 3.0, 4)
    state.log(kind="initial", par2=3.0)
    assert state.trace() == [3.0]
    assert state.to_json()["history"] == [{"kind": "initial", "par2": 3.0, "best": 3.0}]
    assert state.history_jsonl().count("\n") == 1
