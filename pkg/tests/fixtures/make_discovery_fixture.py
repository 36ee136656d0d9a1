"""Regenerate the discovery replay fixture.

Runs ``discover`` on a 10-instance random 3-SAT set with a scripted coder,
records every exchange, and stores the outcome the replay test must reproduce.

    python3 tests/fixtures/make_discovery_fixture.py
"""
from __future__ import annotations

import json
from pathlib import Path

from modsat.dsl import extract_marked, transcription
from modsat.evaluation.generators import generate_instances
from modsat.llm import MockClient, RecordingClient
from modsat.search import DatasetEvaluator, discover

HERE = Path(__file__).parent / "discovery"
CANDIDATES = (4, 3, 1)  # restart_condition, reduce_condition, rephase_condition
MAX_ITER = 7
TIMEOUT = 1.0


def marked(slot: str, body: str, preamble: str = "Here is the new function.") -> str:
    return f"{preamble}\n// start {slot}\n{body.strip()}\n// end {slot}\n"


def preset_body(preset_id: str) -> str:
    slot = preset_id.split("/", 1)[0]
    return extract_marked(transcription(preset_id), slot)


SCRIPT = [
    # 1 restart_condition: improving
    marked("restart_condition", preset_body("restart_condition/lbd-adaptive")),
    # 2 reduce_condition: same as the incumbent up to comments and parentheses
    marked("reduce_condition", """
bool reduce_condition() {
    // reduce once the learnt database is full
    return (learnts_size) >= (max_learnts);
}"""),
    # 3 reduce_condition again: broken, then repaired
    marked("reduce_condition", """
bool reduce_condition() {
    if (learnts_size >= max_learnts) return true;
    return wasted_mem > arena_bytes * 0.5;
}"""),
    marked("reduce_condition", """
bool reduce_condition() {
    return learnts_size >= max_learnts * 0.8;
}""", "Fixed version:"),
    # 4 rephase_condition: improving
    marked("rephase_condition", """
bool rephase_condition() {
    return conflicts % 700 == 0;
}"""),
    # 5 restart_condition: a candidate that restarts very eagerly
    marked("restart_condition", """
bool restart_condition() {
    return conflictR >= 8;
}"""),
    # 6 reduce_condition: broken, repair also broken
    marked("reduce_condition", """
bool reduce_condition() {
    return learnts_size >= ;
}"""),
    "Sorry, I could not fix it.",
    # 7 rephase_condition: no markers at all, repaired into a worse candidate
    "Rephase more often so the search escapes stagnant regions.",
    marked("rephase_condition", """
bool rephase_condition() {
    return conflicts % 300 == 0;
}"""),
]


def main() -> None:
    manifest = generate_instances("random-3sat", {"n": 120}, 7, HERE, count=10, timeout=TIMEOUT,
                                  name="discovery-micro", candidates=CANDIDATES)
    instances = manifest.load_instances()
    client = RecordingClient(MockClient(list(SCRIPT)))
    evaluate = DatasetEvaluator(TIMEOUT, clock="work")
    state = discover(instances, CANDIDATES, client, evaluate, repairer=client,
                     max_iter=MAX_ITER, seed=0)
    client.transcript.save(HERE / "transcript.jsonl")
    expected = {
        "candidates": list(CANDIDATES),
        "max_iter": MAX_ITER,
        "timeout": TIMEOUT,
        "final_suite": state.incumbent.to_json(),
        "final_par2": state.best,
        "par2_trace": state.trace(),
        "kinds": [h["kind"] for h in state.history],
        "evaluations": evaluate.calls,
    }
    (HERE / "expected.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
    for h in state.history:
        print({k: v for k, v in h.items() if k != "canonical"})


if __name__ == "__main__":
    main()
