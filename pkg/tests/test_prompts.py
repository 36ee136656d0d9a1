from __future__ import annotations

import math
import re

import pytest

from modsat.dsl import extract_marked, transcription
from modsat.llm import LLMError, MockClient
from modsat.prompts import (CODER_SYSTEM, REFINER_SYSTEM, PromptTemplate, TemplateError, assess,
                            canonical_diversity, key_code, load_template, optimize_prompt, render)


ORIGINAL_RENDERED = """\
You are a SAT solver researcher trying to rewrite the restart_condition  function(s).

Your goal is to improve the SAT solver by rewriting the restart_condition  function(s), after reading and understanding the <key code> of SAT solver below.

Tips:
1) Your rewrited function code must start with '''// start {function name}''' and end with '''// end {function name}'''
2) Your rewrited function(s) code must be different from original code, not just rewrite code synonymous!
3) You are not allowed to create your own new function(s) in the rewrited function(s).  You are not allowed to create your own new global variables, but you can use the global variables existing in the <key code>.
4) Make sure the rewrited function(s) code can be executed correctly.

<key code> of SAT solver is:
KEY
"""


def test_original_template_renders_the_figure_text():
    assert render(load_template("original"), "restart_condition", "KEY") == ORIGINAL_RENDERED


def test_updated_template_loads_and_keeps_marker_contract():
    t = load_template("updated")
    assert t.has_marker_contract() and load_template("original").has_marker_contract()
    text = render(t, "reduce_condition", "KEY")
    assert "improve the reduce_condition function" in text and text.endswith('KEY\n"""\n')
    assert "Take a deep breath" in text


def test_template_roundtrip_and_errors():
    t = load_template("original")
    assert PromptTemplate.loads(t.dumps()) == t
    with pytest.raises(TemplateError):
        PromptTemplate.loads("[role]\nx\n")
    with pytest.raises(TemplateError):
        PromptTemplate.loads("preamble\n[role]\nx\n[goal]\ny\n[tips]\nz\n")
    no_name = t.with_section("role", "A researcher.").with_section("goal", "Improve it.")
    with pytest.raises(TemplateError):
        render(no_name, "restart_condition", "KEY")
    with pytest.raises(TemplateError):
        render(t.with_section("tips", "{{ other }}"), "restart_condition", "KEY")
    with pytest.raises(KeyError):
        t.with_section("nope", "x")


def calls_section(text: str) -> str:
    return text.split("Calls available here:")[1].split("// Signature")[0]


def test_key_code_lists_state_and_current_hook():
    body = extract_marked(transcription("restart_condition/baseline"), "restart_condition")
    text = key_code("restart_condition", body)
    assert "conflictR: int (writable)" in text
    assert "cancel_until" not in calls_section(text)
    assert text.endswith(f"// start restart_condition\n{body.strip()}\n// end restart_condition")
    assert "cancel_until" in calls_section(key_code("restart_function", "void restart_function() { }"))
    assert "// Signature: var_bump_activity(int v, real inc)" in key_code("var_bump_activity", "")


def test_assess_outcomes():
    good = "// start restart_condition\nbool restart_condition() { return conflicts > 5; }\n// end restart_condition"
    g = assess(good, "restart_condition")
    assert g.ok and g.canonical
    assert not assess("no code", "restart_condition").ok
    bad = good.replace("conflicts > 5", "conflicts >")
    assert not assess(bad, "restart_condition").ok
    illegal = good.replace("return", "conflicts = 1; return")
    assert not assess(illegal, "restart_condition").ok


def test_canonical_diversity_collapses_duplicates():
    assert canonical_diversity(["a", "a", "a"]) == 0.0
    assert canonical_diversity(["x > 1", "y < 2 && z", "q"]) >= 0.0


# -- optimisation loop with a scripted model ---------------------------------

def program(k: int) -> str:
    return (f"// start {{slot}}\nbool {{slot}}() {{{{ return conflicts > {k}; }}}}\n// end {{slot}}")


def scripted(levels: dict, refinements: list[str]):
    """Coder output depends on the LEVEL tag in the current tips: (distinct programs, valid count)."""
    queue = list(refinements)

    def respond(req):
        if req.system == REFINER_SYSTEM:
            return queue.pop(0)
        assert req.system == CODER_SYSTEM
        level = max(int(n) for n in re.findall(r"LEVEL (\d+)", req.user))
        distinct, valid = levels[level]
        slot = re.search(r"[Rr]ewrite (\w+)", req.user).group(1)
        respond.calls[level] = respond.calls.get(level, 0) + 1
        k = respond.calls[level]
        if (k - 1) % 20 >= valid:
            return "I cannot do that."
        return program(k % distinct).format(slot=slot)

    respond.calls = {}
    return respond


def base_template(level: int = 0) -> PromptTemplate:
    return PromptTemplate(role="Please rewrite {{ func_name }} now.", goal="Make it faster.",
                          tips=f"LEVEL {level}\nWrap code in // start and // end markers.")


def distinct_scorer(texts):
    return math.log(len(set(texts)))


SLOTS = ("restart_condition",)


def test_rising_diversity_accepts_every_refinement():
    levels = {0: (1, 20), 1: (2, 20), 2: (4, 20), 3: (8, 20)}
    refs = [f"Rewrite {{{{ func_name }}}}. LEVEL {n}\nWrap code in // start and // end markers." for n in (1, 2, 3)]
    trace = []
    out = optimize_prompt(base_template(), MockClient(scripted(levels, refs)), distinct_scorer,
                          i=3, j=20, slots=SLOTS, seed=0, trace=trace)
    assert "LEVEL 3" in out.dumps()
    accepted = [t["diversity"] for t in trace if t["accepted"]]
    assert accepted == sorted(set(accepted)) and len(accepted) == 4
    assert all(t["success"] == 1.0 for t in trace)


def test_low_success_blocks_acceptance():
    levels = {0: (1, 20), 1: (8, 9), 2: (8, 10)}
    refs = [f"Rewrite {{{{ func_name }}}}. LEVEL {n}\nWrap code in // start and // end markers." for n in (1, 2)]
    t0 = base_template()
    trace = []
    out = optimize_prompt(t0, MockClient(scripted(levels, refs)), distinct_scorer, i=2, j=20,
                          success_threshold=0.5, slots=SLOTS, trace=trace)
    assert out == t0
    assert [t["success"] for t in trace[1:]] == [0.45, 0.5]
    assert not any(t["accepted"] for t in trace[1:])


def test_zero_iterations_returns_input_untouched():
    client = MockClient([])
    t0 = base_template()
    assert optimize_prompt(t0, client, distinct_scorer, i=0) is t0
    assert client.requests == []


def test_llm_failure_skips_iteration():
    levels = {0: (1, 20), 1: (4, 20)}

    def respond(req, inner=scripted(levels, ["Rewrite {{ func_name }}. LEVEL 1\n// start markers"])):
        if req.system == REFINER_SYSTEM and not respond.failed:
            respond.failed = True
            return LLMError("rate limited")
        return inner(req)

    respond.failed = False
    trace = []
    out = optimize_prompt(base_template(), MockClient(respond), distinct_scorer, i=2, j=20,
                          slots=SLOTS, trace=trace)
    assert "error" in trace[1] and trace[2]["accepted"]
    assert "LEVEL 1" in out.dumps()
