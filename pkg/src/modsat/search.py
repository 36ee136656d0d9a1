"""Heuristic search: hook presearch, a (1+λ) evolutionary loop and LLM-driven discovery."""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .dsl import (DslError, canonicalize, extract_marked, is_synonymous, parse, transcription,
                  validate)
from .hooks.presets import PRESETS, baseline_id, presets_for
from .hooks.suite import DslStrategy, HeuristicSuite, HookFault, NativePreset
from .hooks.view import SLOTS, slot_by_index, slot_index
from .llm import GENERATION_TEMPERATURE, JUDGE_TEMPERATURE, ChatRequest, LLMError
from .prompts import CODER_SYSTEM, PromptTemplate, key_code, load_template, render

TOP_K = 4
REPAIR_SYSTEM = "You fix heuristic functions for a CDCL SAT solver so that they pass validation."
JUDGE_SYSTEM = "You decide whether two heuristic functions are synonymous. Answer YES or NO."


@dataclass
class SearchState:
    retained: tuple
    incumbent: HeuristicSuite
    best: float
    budget: int
    history: list = field(default_factory=list)

    def log(self, **record) -> None:
        record.setdefault("best", self.best)
        self.history.append(record)

    def to_json(self) -> dict:
        return {"retained": list(self.retained), "incumbent": self.incumbent.to_json(),
                "best": self.best, "budget": self.budget, "history": self.history}

    def trace(self) -> list[float]:
        return [h["best"] for h in self.history]

    def history_jsonl(self) -> str:
        return "".join(json.dumps(h, sort_keys=True) + "\n" for h in self.history)


# -- evaluation --------------------------------------------------------------

class DatasetEvaluator:
    """``evaluate(suite, instances) -> PAR-2`` backed by the benchmark harness."""

    def __init__(self, timeout: float, cfg=None, clock: str = "work", jobs: int = 1):
        self.timeout = timeout
        self.cfg = cfg
        self.clock = clock
        self.jobs = jobs
        self.calls = 0
        self.last_records: list = []

    def __call__(self, suite: HeuristicSuite, instances) -> float:
        from .evaluation import evaluate_suite

        self.calls += 1
        report, records = evaluate_suite(instances, suite, self.cfg, self.timeout,
                                         jobs=self.jobs, clock=self.clock)
        self.last_records = records
        return report.par2


def compact_subset(instances: Sequence, seed: int = 0) -> list:
    """Every other instance after a seeded shuffle: ceil(N/2) of them."""
    order = list(range(len(instances)))
    random.Random(seed).shuffle(order)
    return [instances[i] for i in order[::2]]


def presearch(instances: Sequence, evaluate: Callable, full_suite: HeuristicSuite,
              baselines: HeuristicSuite | None = None, *, seed: int = 0, top: int = TOP_K,
              scores: dict | None = None) -> tuple:
    """Indices (1..7) of the hooks whose reversion to baseline hurts most.

    Each hook is reverted in turn on the compact subset; the ``top`` highest
    PAR-2 scores mark the hooks worth keeping. Ties go to the lower index.
    """
    if len(instances) < 2:
        raise ValueError("presearch needs at least two instances")
    baselines = baselines or HeuristicSuite.baseline()
    compact = compact_subset(instances, seed)
    f = {}
    for slot in SLOTS:
        test = full_suite.replace(slot, baselines.get(slot))
        f[slot_index(slot)] = evaluate(test, compact)
    if all(math.isinf(v) or math.isnan(v) for v in f.values()):
        raise RuntimeError("presearch: every evaluation failed")
    if scores is not None:
        scores.update(f)
    ranked = sorted(f, key=lambda i: (-f[i], i))
    return tuple(sorted(ranked[:top]))


# -- (1+λ) evolution ---------------------------------------------------------

def sample_modification_count(rng: random.Random, n: int) -> int:
    """ℓ ~ Bin(n, 1/n), redrawn while ℓ = 0."""
    if n < 1:
        raise ValueError("need at least one retained hook")
    p = 1.0 / n
    while True:
        ell = sum(1 for _ in range(n) if rng.random() < p)
        if ell > 0:
            return ell


def conditional_binomial_pmf(n: int, k: int) -> float:
    p = 1.0 / n
    return math.comb(n, k) * p ** k * (1 - p) ** (n - k) / (1.0 - (1 - p) ** n)


def as_strategy(result, slot: str):
    """Generator output (preset id, DSL text or a strategy) as a validated strategy."""
    if isinstance(result, (NativePreset, DslStrategy)):
        strategy = result
    elif isinstance(result, str) and result in PRESETS:
        strategy = NativePreset(result)
    elif isinstance(result, str):
        body = extract_marked(result, slot)
        strategy = DslStrategy(body if body is not None else result)
    else:
        raise TypeError(f"generator returned {type(result).__name__}")
    if isinstance(strategy, NativePreset) and not strategy.id.startswith(slot + "/"):
        raise ValueError(f"preset {strategy.id} does not fit slot {slot}")
    if isinstance(strategy, DslStrategy):
        _, diags = validate(strategy.source, slot)
        if diags:
            raise DslError(diags)
    return strategy


def initial_suite(retained, full_suite: HeuristicSuite,
                  baselines: HeuristicSuite | None = None) -> HeuristicSuite:
    baselines = baselines or HeuristicSuite.baseline()
    suite = baselines
    for i in retained:
        slot = slot_by_index(i)
        suite = suite.replace(slot, full_suite.get(slot))
    return suite


def evolve(instances: Sequence, retained, generator: Callable, evaluate: Callable,
           full_suite: HeuristicSuite | None = None, *, lam: int = 1, budget: int = 50,
           seed: int = 0, baselines: HeuristicSuite | None = None) -> SearchState:
    """(1+λ) EA over the retained hooks; accepts offspring that are no worse.

    ``generator(suite, slot, rng)`` returns a preset id, DSL text or a strategy.
    Every offspring evaluation costs one unit of ``budget``; a failing
    generator also costs one unit and leaves the incumbent unchanged.
    """
    retained = tuple(sorted(retained))
    if not retained:
        raise ValueError("retained set is empty")
    if lam < 1:
        raise ValueError("lambda must be at least 1")
    rng = random.Random(seed)
    full_suite = full_suite or HeuristicSuite.discovered()
    suite = initial_suite(retained, full_suite, baselines)
    state = SearchState(retained, suite, evaluate(suite, instances), budget)
    state.log(step=0, kind="initial", par2=state.best, accepted=True)
    step = 0
    while state.budget > 0:
        step += 1
        ell = sample_modification_count(rng, len(retained))
        chosen = sorted(rng.sample(retained, ell))
        parent = state.incumbent
        for _ in range(lam):
            if state.budget <= 0:
                break
            slots = [slot_by_index(i) for i in chosen]
            try:
                child = parent
                for slot in slots:
                    child = child.replace(slot, as_strategy(generator(parent, slot, rng), slot))
            except Exception as exc:  # generator or validation failure
                state.budget -= 1
                state.log(step=step, kind="offspring", slots=slots, par2=None, accepted=False,
                          error=f"{type(exc).__name__}: {exc}")
                continue
            score = evaluate(child, instances)
            state.budget -= 1
            accepted = score <= state.best
            if accepted:
                state.incumbent, state.best = child, score
            state.log(step=step, kind="offspring", slots=slots, par2=score, accepted=accepted,
                      suite=child.describe())
    return state


def preset_generator(choices: dict[str, Sequence[str]] | None = None):
    """Generator that draws registry presets for a slot (no LLM needed)."""
    def generate(suite, slot, rng):
        options = list(choices[slot]) if choices else presets_for(slot)
        return rng.choice(options)
    return generate


def strategy_source(strategy) -> str:
    """DSL text of a strategy; native presets map to their shipped transcription."""
    if isinstance(strategy, DslStrategy):
        return strategy.source
    return extract_marked(transcription(strategy.id), strategy.id.split("/", 1)[0])


class LLMGenerator:
    """Asks a chat client for a new implementation of one slot."""

    def __init__(self, client, template: PromptTemplate | None = None,
                 temperature: float = GENERATION_TEMPERATURE):
        self.client = client
        self.template = template or load_template("updated")
        self.temperature = temperature

    def request(self, suite: HeuristicSuite, slot: str) -> ChatRequest:
        prompt = render(self.template, slot, key_code(slot, strategy_source(suite.get(slot))))
        return ChatRequest(CODER_SYSTEM, prompt, self.temperature)

    def __call__(self, suite, slot, rng=None) -> str:
        text = self.client.complete(self.request(suite, slot))
        body = extract_marked(text, slot)
        if body is None:
            raise DslError([])
        return body


# -- discovery loop ----------------------------------------------------------

def repair_request(slot: str, source: str, diagnostics: Sequence[str]) -> ChatRequest:
    user = (f"The {slot} function below fails validation.\n\n// start {slot}\n{source.strip()}\n"
            f"// end {slot}\n\nProblems:\n" + "\n".join(f"- {d}" for d in diagnostics) +
            f"\n\nReturn the corrected function between '// start {slot}' and '// end {slot}'.")
    return ChatRequest(REPAIR_SYSTEM, user, JUDGE_TEMPERATURE)


def judge_request(slot: str, a: str, b: str) -> ChatRequest:
    user = f"Function A ({slot}):\n{a}\n\nFunction B ({slot}):\n{b}\n\nAre they synonymous?"
    return ChatRequest(JUDGE_SYSTEM, user, JUDGE_TEMPERATURE)


def _smoke_test(source: str, slot: str, suite: HeuristicSuite, instance, work_limit: int):
    """Run the candidate briefly on one instance; returns a diagnostic or None."""
    from .solver import SolverConfig, solve

    if instance is None:
        return None
    try:
        solve(instance, suite.replace(slot, DslStrategy(source)),
              SolverConfig(work_limit=work_limit))
    except HookFault as exc:
        return f"runtime: {exc.detail}"
    return None


def _smallest(instances):
    """Smallest formula of an ``[(id, Formula)]`` dataset, used for smoke runs."""
    pairs = [x for x in instances if isinstance(x, tuple) and len(x) == 2]
    if not pairs:
        return None
    return min(pairs, key=lambda p: (len(p[1].clauses), p[0]))[1]


def _diagnose(source: Optional[str], slot: str, suite, smoke_instance, smoke_work):
    if source is None:
        return None, [f"missing '// start {slot}' / '// end {slot}' markers"]
    program, diags = validate(source, slot)
    if program is None:
        return None, [str(d) for d in diags]
    fault = _smoke_test(source, slot, suite, smoke_instance, smoke_work)
    if fault is not None:
        return None, [fault]
    return program, []


def _current_program(suite: HeuristicSuite, slot: str):
    return parse(strategy_source(suite.get(slot)), slot)


def discover(instances: Sequence, candidates: Sequence[int], coder, evaluate: Callable,
             start_suite: HeuristicSuite | None = None, *, evaluator=None, repairer=None,
             max_iter: int = 10, template: PromptTemplate | None = None, seed: int = 0,
             slot_policy: str = "round-robin", smoke_work: int = 20_000) -> SearchState:
    """Generate, validate, repair and evaluate heuristics one slot at a time.

    A synonymous generation uses up its iteration and the same slot is asked
    again next time. A candidate is adopted only when its PAR-2 is strictly
    lower than the incumbent's.
    """
    if not candidates:
        raise ValueError("no candidate hooks")
    if slot_policy not in ("round-robin", "random"):
        raise ValueError(f"unknown slot policy {slot_policy!r}")
    template = template or load_template("updated")
    rng = random.Random(seed)
    suite = start_suite or HeuristicSuite.baseline()
    state = SearchState(tuple(candidates), suite, evaluate(suite, instances), max_iter)
    state.log(iteration=0, kind="initial", par2=state.best, accepted=True)
    smoke_instance = _smallest(instances)
    pointer = 0
    retry_slot = None

    def judge(a: str, b: str) -> bool:
        reply = evaluator.complete(judge_request(slot, a, b))
        return reply.strip().upper().startswith("YES")

    for it in range(1, max_iter + 1):
        state.budget -= 1
        if retry_slot is not None:
            slot, retry_slot = retry_slot, None
        elif slot_policy == "random":
            slot = slot_by_index(rng.choice(list(candidates)))
        else:
            slot = slot_by_index(candidates[pointer % len(candidates)])
            pointer += 1
        incumbent = state.incumbent
        prompt = render(template, slot, key_code(slot, strategy_source(incumbent.get(slot))))
        try:
            text = coder.complete(ChatRequest(CODER_SYSTEM, prompt, GENERATION_TEMPERATURE))
        except LLMError as exc:
            state.log(iteration=it, slot=slot, kind="coder-error", error=str(exc), accepted=False)
            continue
        source = extract_marked(text, slot)

        if source is not None:
            try:
                program = parse(source, slot)
            except DslError:
                program = None
            if program is not None:
                try:
                    synonymous = is_synonymous(program, _current_program(incumbent, slot),
                                               judge if evaluator is not None else None)
                except LLMError as exc:
                    state.log(iteration=it, slot=slot, kind="judge-error", error=str(exc),
                              accepted=False)
                    continue
                if synonymous:
                    retry_slot = slot
                    state.log(iteration=it, slot=slot, kind="synonymous", accepted=False)
                    continue

        program, diags = _diagnose(source, slot, incumbent, smoke_instance, smoke_work)
        repaired = False
        if program is None:
            if repairer is None:
                state.log(iteration=it, slot=slot, kind="invalid", diagnostics=diags,
                          accepted=False)
                continue
            try:
                fixed = repairer.complete(repair_request(slot, source or text, diags))
            except LLMError as exc:
                state.log(iteration=it, slot=slot, kind="repair-error", error=str(exc),
                          accepted=False)
                continue
            source = extract_marked(fixed, slot)
            program, diags2 = _diagnose(source, slot, incumbent, smoke_instance, smoke_work)
            if program is None:
                state.log(iteration=it, slot=slot, kind="invalid", diagnostics=diags + diags2,
                          repaired=True, accepted=False)
                continue
            repaired = True

        candidate = incumbent.replace(slot, DslStrategy(source))
        score = evaluate(candidate, instances)
        accepted = score < state.best
        if accepted:
            state.incumbent, state.best = candidate, score
        state.log(iteration=it, slot=slot, kind="evaluated", par2=score, repaired=repaired,
                  accepted=accepted, canonical=canonicalize(program).text)
    state.budget = max(state.budget, 0)
    return state
