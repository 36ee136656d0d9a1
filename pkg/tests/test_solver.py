from __future__ import annotations

import random

import pytest

from modsat.cnf import Formula, parse_dimacs
from modsat.evaluation.generators import parity_chain, pigeonhole, random_3sat
from modsat.hooks import DslStrategy, HeuristicSuite, HookFault
from modsat.solver import SAT, UNKNOWN, UNSAT, Solver, SolverConfig, solve

from oracles import brute_force_sat, model_satisfies, truth_table_sat


def small_instances(count, seed, n_max=14):
    rng = random.Random(seed)
    for i in range(count):
        n = rng.randint(3, n_max)
        yield random_3sat(n, ratio=rng.uniform(3.0, 5.5), seed=rng.randrange(10 ** 9))


def test_oracles_agree_with_each_other():
    for f in small_instances(60, seed=1, n_max=12):
        assert brute_force_sat(f.num_vars, f.clauses)[0] == truth_table_sat(f.num_vars, f.clauses)


@pytest.mark.parametrize("cfg", [
    SolverConfig(debug=True),
    SolverConfig(minimize=True, debug=True),
    SolverConfig(rnd_freq=0.3, rnd_init=True, seed=5, debug=True),
    SolverConfig(var_decay=0.5, cla_decay=0.5, rfirst=1, min_learnts=1, gc_frac=0.01, debug=True),
])
def test_agrees_with_exhaustive_search(cfg):
    for f in small_instances(80, seed=2):
        expected, _ = brute_force_sat(f.num_vars, f.clauses)
        res = solve(f, None, cfg)
        assert res.status == (SAT if expected else UNSAT)
        if res.status == SAT:
            assert model_satisfies(f.clauses, res.model)


def test_discovered_suite_is_sound():
    suite = HeuristicSuite.discovered()
    for f in small_instances(60, seed=3, n_max=20):
        expected, _ = brute_force_sat(f.num_vars, f.clauses)
        res = solve(f, suite, SolverConfig(debug=True))
        assert res.status == (SAT if expected else UNSAT)
        if expected:
            assert model_satisfies(f.clauses, res.model)


@pytest.mark.parametrize("f", [pigeonhole(5, 4), parity_chain(8, seed=1, satisfiable=False)])
def test_structured_unsat(f):
    assert solve(f).status == UNSAT


def test_satisfiable_parity_chain():
    f = parity_chain(8, seed=2, satisfiable=True)
    res = solve(f)
    assert res.status == SAT and model_satisfies(f.clauses, res.model)


def test_edge_cases():
    assert solve(Formula(0, ())).status == SAT
    assert solve(Formula(3, ())).model == [False, False, False]
    assert solve(parse_dimacs("p cnf 1 1\n0\n")).status == UNSAT
    assert solve(parse_dimacs("p cnf 1 2\n1 0\n-1 0\n")).status == UNSAT
    assert solve(parse_dimacs("p cnf 2 2\n1 0\n-1 2 0\n")).model == [True, True]


def test_work_limit_gives_unknown():
    res = solve(pigeonhole(8, 7), None, SolverConfig(work_limit=2000))
    assert res.status == UNKNOWN and res.exit_code == 0
    assert res.stats["propagations"] > 2000


def test_wall_timeout_gives_unknown():
    res = solve(pigeonhole(9, 8), None, SolverConfig(timeout=0.05))
    assert res.status == UNKNOWN and res.wall_time < 5


def test_competition_output_and_exit_codes():
    res = solve(parse_dimacs("p cnf 2 2\n1 0\n-2 0\n"))
    assert res.exit_code == 10
    assert res.competition_output() == "s SATISFIABLE\nv 1 -2\nv 0\n"
    res = solve(parse_dimacs("p cnf 1 2\n1 0\n-1 0\n"))
    assert res.exit_code == 20 and res.competition_output() == "s UNSATISFIABLE\n"


def test_deterministic_for_fixed_seed():
    f = random_3sat(80, seed=11)
    cfg = SolverConfig(seed=3, rnd_freq=0.1)
    a, b = solve(f, None, cfg), solve(f, None, cfg)
    assert a.stats == b.stats and a.model == b.model


@pytest.mark.parametrize("kwargs", [
    {"var_decay": 1.0}, {"var_decay": 0.0}, {"cla_decay": 1.5}, {"rnd_freq": -0.1},
    {"rfirst": 0}, {"rfirst": 2.5}, {"rinc": 1.5}, {"gc_frac": 1.0}, {"min_learnts": -1},
    {"timeout": 0}, {"work_limit": 0},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_hook_fault_names_slot():
    bad = DslStrategy("bool restart_condition() { return 1 / (conflicts - conflicts) > 0; }")
    suite = HeuristicSuite.baseline().replace("restart_condition", bad)
    with pytest.raises(HookFault) as err:
        solve(random_3sat(40, seed=1), suite)
    assert err.value.slot == "restart_condition"


def test_lbd_window_tracks_last_fifty():
    s = Solver(random_3sat(10, seed=0))
    rng = random.Random(0)
    lbds = [rng.randint(1, 80) for _ in range(180)]
    for lbd in lbds:
        s._record_lbd(lbd)
    assert s.lbd_queue_size == 50
    assert s.fast_lbd_sum == sum(lbds[-50:])
    assert s.slow_lbd_sum == sum(min(l, 50) for l in lbds)
    assert s.conflicts == s.conflictR == s.rephases == 180


def _run_until_learnts(f, count):
    s = Solver(f, None, SolverConfig())
    # keep the gates from reducing on their own
    s.max_learnts = float("inf")
    s.cfg.work_limit = 10 ** 9
    while len(s.learnts) < count:
        confl = s.propagate()
        if confl is not None:
            assert s.trail_lim
            learnt, bt, lbd = s.analyze(confl)
            s.cancel_until(bt)
            s._learn(learnt, lbd)
            s._record_lbd(lbd)
        else:
            lit = s.pick_branch_lit()
            assert lit != -1
            s.new_decision_level()
            s._enqueue(lit, None)
    return s


def test_reduce_db_removes_low_activity_long_unlocked_clauses():
    s = _run_until_learnts(random_3sat(60, seed=5), 40)
    rng = random.Random(1)
    for c in s.learnts:
        c.activity = rng.random()
    before = list(s.learnts)
    ranked = sorted(before, key=lambda c: c.activity)
    low = ranked[: len(ranked) // 2]
    expect_removed = {id(c) for c in low if len(c.lits) > 2 and not s._locked(c)}
    wasted, arena = s.wasted_bytes, s.arena_bytes
    s.reduce_db()
    kept = {id(c) for c in s.learnts}
    assert kept == {id(c) for c in before} - expect_removed
    assert all(c.idx == i for i, c in enumerate(s.learnts))
    assert all(not c.removed for ws in s.watches for c in ws)
    freed = sum(12 + 4 * len(c.lits) for c in before if id(c) in expect_removed)
    total = wasted + freed
    if total > arena * s.garbage_frac:
        assert (s.wasted_bytes, s.arena_bytes) == (0, arena - total)
    else:
        assert (s.wasted_bytes, s.arena_bytes) == (total, arena)
    assert expect_removed


def test_cancel_until_tracks_best_trail_and_saves_phases():
    s = _run_until_learnts(random_3sat(60, seed=6), 5)
    while s.decision_level < 2:
        lit = s.pick_branch_lit()
        s.new_decision_level()
        s._enqueue(lit, None)
        if s.propagate() is not None:
            break
    trail = list(s.trail)
    s.threshold = 0
    s.cancel_until(0)
    assert s.threshold == len(trail)
    for lit in trail[len(s.trail):]:
        assert s.saved[lit >> 1] == (not lit & 1) == s.polarity[lit >> 1]
    for lit in trail:
        assert s.local_best[lit >> 1] == (not lit & 1)


def test_progress_estimate_is_a_fraction():
    s = Solver(random_3sat(30, seed=2))
    assert s.progress_estimate() == 0.0 or 0 <= s.progress_estimate() <= 1
    s.propagate()
    lit = s.pick_branch_lit()
    s.new_decision_level()
    s._enqueue(lit, None)
    s.propagate()
    assert 0 < s.progress_estimate() <= 1
