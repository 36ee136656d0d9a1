"""Prompt templates for heuristic generation and their automatic refinement."""
from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, replace
from importlib import resources
from typing import Callable, Optional, Sequence

from .dsl import DslError, canonicalize, check, extract_marked, parse
from .hooks.view import ARRAYS, CALLS, FIELDS, SLOT_KIND, SLOT_PARAMS, SLOTS
from .llm import GENERATION_TEMPERATURE, ChatRequest, LLMError

SECTIONS = ("role", "goal", "tips", "key_code")
REFINABLE = ("role", "goal", "tips")
_PLACEHOLDER = re.compile(r"\{\{\s*([A-Za-z_][A-Za-z_0-9]*)\s*\}\}")
_MARKER_CONTRACT = re.compile(r"//\s*start")

CODER_SYSTEM = "You write heuristic functions for a CDCL SAT solver."
REFINER_SYSTEM = "You improve prompts that ask a model to write SAT solver heuristics."


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    role: str
    goal: str
    tips: str
    key_code: str = "<key code> of SAT solver is:\n{{ replace_key_code }}"

    def section(self, name: str) -> str:
        return getattr(self, name)

    def with_section(self, name: str, text: str) -> "PromptTemplate":
        if name not in SECTIONS:
            raise KeyError(name)
        return replace(self, **{name: text})

    def dumps(self) -> str:
        return "".join(f"[{name}]\n{getattr(self, name).rstrip()}\n\n" for name in SECTIONS)

    @classmethod
    def loads(cls, text: str) -> "PromptTemplate":
        parts: dict[str, list[str]] = {}
        current = None
        for line in text.splitlines():
            m = re.fullmatch(r"\[(role|goal|tips|key_code)\]\s*", line)
            if m:
                current = m.group(1)
                parts[current] = []
            elif current is not None:
                parts[current].append(line)
            elif line.strip():
                raise TemplateError("text before the first section header")
        missing = [s for s in REFINABLE if s not in parts]
        if missing:
            raise TemplateError(f"template lacks sections: {', '.join(missing)}")
        fields = {k: "\n".join(v).strip("\n") for k, v in parts.items()}
        return cls(**fields)

    def has_marker_contract(self) -> bool:
        return bool(_MARKER_CONTRACT.search(self.goal) or _MARKER_CONTRACT.search(self.tips))


def load_template(name: str) -> PromptTemplate:
    """Shipped templates: ``original`` or ``updated``."""
    text = resources.files("modsat").joinpath("data", f"prompt_{name}.txt").read_text()
    return PromptTemplate.loads(text)


def render(t: PromptTemplate, slot: str, key_code: str) -> str:
    """Role, goal, tips and the key-code section, with placeholders filled in."""
    if "func_name" not in {m.group(1) for s in REFINABLE for m in _PLACEHOLDER.finditer(t.section(s))}:
        raise TemplateError("template never mentions {{func_name}}")
    if not _PLACEHOLDER.search(t.key_code):
        raise TemplateError("key_code section lacks {{replace_key_code}}")
    values = {"func_name": slot, "replace_key_code": key_code}

    def fill(text: str) -> str:
        def sub(m):
            name = m.group(1)
            if name not in values:
                raise TemplateError(f"unresolved placeholder {{{{{name}}}}}")
            return values[name]
        return _PLACEHOLDER.sub(sub, text)

    head = "\n\n".join(fill(t.section(s)).strip("\n") for s in REFINABLE)
    return head + "\n\n" + fill(t.key_code).rstrip("\n") + "\n"


def key_code(slot: str, current_source: str, main_loop: str | None = None) -> str:
    """Context handed to the coder: the state surface, the loop, and the current hook."""
    kind = SLOT_KIND[slot]
    lines = ["// Solver state visible to heuristics (name: type, writable here?)"]
    for name, spec in FIELDS.items():
        lines.append(f"//   {name}: {spec.type}{' (writable)' if kind in spec.writable_in else ''}")
    for name, spec in ARRAYS.items():
        lines.append(f"//   {name}[{spec.domain}]: {spec.type}"
                     f"{' (writable)' if kind in spec.writable_in else ''}")
    lines.append("// Calls available here:")
    for name, spec in CALLS.items():
        if kind in spec.allowed_in:
            lines.append(f"//   {spec.returns} {name}({', '.join(spec.args)})")
    params = ", ".join(f"{t} {n}" for n, t in SLOT_PARAMS[slot])
    lines.append(f"// Signature: {slot}({params})")
    lines.append("")
    lines.append(main_loop or MAIN_LOOP)
    lines.append("")
    lines.append(f"// start {slot}")
    lines.append(current_source.strip("\n"))
    lines.append(f"// end {slot}")
    return "\n".join(lines)


MAIN_LOOP = """\
loop {
    confl = propagate();
    if (confl) {
        if (decision_level == 0) return UNSAT;
        (learnt, bt, lbd) = analyze(confl);   // calls var_bump_activity / cla_bump_activity
        cancel_until(bt); learn(learnt); record_lbd(lbd);
        var_inc /= var_decay; cla_inc /= cla_decay;
        if (restart_condition()) restart_function();
        if (rephase_condition()) rephase_function();
        if (reduce_condition()) { reduce_db(); max_learnts *= 1.1; }
    } else {
        lit = pick_branch_lit();
        if (lit == NONE) return SAT;
        new_decision_level(); enqueue(lit);
    }
}"""


# -- generation checks -------------------------------------------------------

@dataclass(frozen=True)
class Generation:
    slot: str
    text: str
    source: Optional[str]
    ok: bool
    canonical: Optional[str]


def assess(text: str, slot: str) -> Generation:
    """Extract, parse and check one model response."""
    body = extract_marked(text, slot)
    if body is None:
        return Generation(slot, text, None, False, None)
    try:
        program = parse(body, slot)
    except DslError:
        return Generation(slot, text, body, False, None)
    if check(program):
        return Generation(slot, text, body, False, None)
    return Generation(slot, text, body, True, canonicalize(program).text)


def canonical_diversity(canonical_texts: Sequence[str], seed: int = 0) -> float:
    """Entropy over distinct canonical forms (one embedding each)."""
    from .diversity import diversity_score

    unique = sorted(set(canonical_texts))
    if len(unique) < 2:
        return 0.0
    return diversity_score(unique, seed=seed)


def refine_request(t: PromptTemplate, part: str) -> ChatRequest:
    user = (f"Here is a prompt template with sections role, goal and tips.\n\n{t.dumps()}\n"
            f"Rewrite only the [{part}] section so that the generated heuristics become more "
            f"varied while staying valid. Keep every {{{{ ... }}}} placeholder. "
            f"Reply with the new section text only.")
    return ChatRequest(REFINER_SYSTEM, user, GENERATION_TEMPERATURE)


def optimize_prompt(t0: PromptTemplate, llm, scorer: Callable[[Sequence[str]], float] | None = None,
                    i: int = 10, j: int = 20, success_threshold: float = 0.5, *,
                    slots: Sequence[str] = SLOTS, current_sources: dict | None = None,
                    seed: int = 0, trace: list | None = None) -> PromptTemplate:
    """Refine one random section per iteration; keep it if diversity rises and enough code is valid.

    The starting diversity is measured on ``t0`` itself. ``trace`` receives
    one dict per iteration.
    """
    if i < 0 or j < 1:
        raise ValueError("need i >= 0 and j >= 1")
    scorer = scorer or canonical_diversity
    if current_sources is None:
        from .dsl import transcription
        from .hooks.presets import baseline_id

        current_sources = {s: extract_marked(transcription(baseline_id(s)), s) for s in slots}
    rng = random.Random(seed)

    def generate(t: PromptTemplate) -> tuple[float, float]:
        gens = []
        for k in range(j):
            slot = slots[k % len(slots)]
            req = ChatRequest(CODER_SYSTEM, render(t, slot, key_code(slot, current_sources[slot])),
                              GENERATION_TEMPERATURE)
            try:
                gens.append(assess(llm.complete(req), slot))
            except LLMError:
                gens.append(Generation(slot, "", None, False, None))
        ok = [g for g in gens if g.ok]
        s = len(ok) / j
        d = scorer([g.canonical for g in ok]) if ok else 0.0
        return d, s

    if i == 0:
        return t0
    best = t0
    d, s0 = generate(t0)
    if trace is not None:
        trace.append({"iteration": 0, "part": None, "diversity": d, "success": s0,
                      "accepted": True})
    for it in range(1, i + 1):
        part = rng.choice(REFINABLE)
        try:
            new_text = llm.complete(refine_request(best, part)).strip("\n")
        except LLMError as exc:
            if trace is not None:
                trace.append({"iteration": it, "part": part, "error": str(exc), "accepted": False})
            continue
        candidate = best.with_section(part, new_text)
        try:
            render(candidate, slots[0], "")
        except TemplateError as exc:
            if trace is not None:
                trace.append({"iteration": it, "part": part, "error": str(exc), "accepted": False})
            continue
        d_i, s_i = generate(candidate)
        accepted = d_i > d and s_i > success_threshold and not math.isnan(d_i)
        if accepted:
            d, best = d_i, candidate
        if trace is not None:
            trace.append({"iteration": it, "part": part, "diversity": d_i, "success": s_i,
                          "accepted": accepted})
    return best
