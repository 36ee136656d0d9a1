"""CDCL search with seven pluggable heuristic hooks.

Literals use the ``2 * var + negated`` encoding from :mod:`modsat.cnf`.
Each clause keeps its two watched literals in ``lits[0]`` and ``lits[1]``;
the literal a clause implied sits in ``lits[0]`` while it is a reason.

After every conflict the solver learns a first-UIP clause, backjumps, and
then consults three condition hooks in turn (restart, rephase, reduce), each
followed by its action when it fires.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from .cnf import Formula, normalize_clause
from .heap import VarOrderHeap
from .hooks.suite import HeuristicSuite, HookFault
from .hooks.view import SolverView

SAT = "SAT"
UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"

EXIT_CODES = {SAT: 10, UNSAT: 20, UNKNOWN: 0}

LBD_CAPACITY = 500
LBD_WINDOW = 50
CHECK_EVERY = 1024
CLAUSE_HEADER_BYTES = 12
LIT_BYTES = 4


@dataclass
class SolverConfig:
    var_decay: float = 0.95
    cla_decay: float = 0.999
    rnd_freq: float = 0.0
    rnd_init: bool = False
    rfirst: int = 100
    rinc: float = 2.0
    gc_frac: float = 0.20
    min_learnts: int = 0
    seed: int = 0
    timeout: Optional[float] = None
    work_limit: Optional[int] = None  # propagations; a deterministic clock
    minimize: bool = False
    debug: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        def bad(name, rule):
            raise ValueError(f"{name}={getattr(self, name)!r} must be {rule}")

        if not 0 < self.var_decay < 1:
            bad("var_decay", "in (0, 1)")
        if not 0 < self.cla_decay < 1:
            bad("cla_decay", "in (0, 1)")
        if not 0 <= self.rnd_freq <= 1:
            bad("rnd_freq", "in [0, 1]")
        if isinstance(self.rfirst, bool) or int(self.rfirst) != self.rfirst or not 1 <= self.rfirst <= 10_000:
            bad("rfirst", "an integer in [1, 10000]")
        if not 1.5 < self.rinc < 4:
            bad("rinc", "in (1.5, 4)")
        if not 0 < self.gc_frac < 1:
            bad("gc_frac", "in (0, 1)")
        if isinstance(self.min_learnts, bool) or int(self.min_learnts) != self.min_learnts \
                or not 0 <= self.min_learnts <= 1_000_000:
            bad("min_learnts", "an integer in [0, 1000000]")
        if self.timeout is not None and self.timeout <= 0:
            bad("timeout", "positive")
        if self.work_limit is not None and self.work_limit <= 0:
            bad("work_limit", "positive")
        self.rfirst = int(self.rfirst)
        self.min_learnts = int(self.min_learnts)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class SolveResult:
    status: str
    model: Optional[list] = None  # list of bools indexed by 0-based var
    stats: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def competition_output(self) -> str:
        """``s``/``v`` lines in the SAT competition format."""
        lines = [f"s {'SATISFIABLE' if self.status == SAT else 'UNSATISFIABLE' if self.status == UNSAT else 'UNKNOWN'}"]
        if self.status == SAT and self.model is not None:
            lits = [str(v + 1 if val else -(v + 1)) for v, val in enumerate(self.model)]
            for i in range(0, len(lits), 20):
                lines.append("v " + " ".join(lits[i:i + 20]))
            lines.append("v 0")
        return "\n".join(lines) + "\n"


class Clause:
    __slots__ = ("lits", "learnt", "activity", "lbd", "removed", "idx")

    def __init__(self, lits: list, learnt: bool = False, lbd: int = 0):
        self.lits = lits
        self.learnt = learnt
        self.activity = 0.0
        self.lbd = lbd
        self.removed = False
        self.idx = -1

    @property
    def nbytes(self) -> int:
        return CLAUSE_HEADER_BYTES + LIT_BYTES * len(self.lits)

    def __repr__(self):
        return f"Clause({self.lits}, learnt={self.learnt})"


class Solver:
    def __init__(self, formula: Formula, suite: HeuristicSuite | None = None,
                 cfg: SolverConfig | None = None):
        self.formula = formula
        self.cfg = cfg = cfg or SolverConfig()
        self.suite = suite or HeuristicSuite.baseline()
        hooks = self.suite.bind()
        self._restart_condition = hooks["restart_condition"]
        self._restart_function = hooks["restart_function"]
        self._rephase_condition = hooks["rephase_condition"]
        self._rephase_function = hooks["rephase_function"]
        self._reduce_condition = hooks["reduce_condition"]
        self._var_bump = hooks["var_bump_activity"]
        self._cla_bump = hooks["cla_bump_activity"]
        self._slot: str | None = None

        n = formula.num_vars
        self.num_vars = n
        self.num_clauses = formula.num_clauses
        self.rng = random.Random(cfg.seed)

        self.assigns = [-1] * n
        self.lit_val = [-1] * (2 * n)
        self.level = [0] * n
        self.reason: list[Clause | None] = [None] * n
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.seen = [False] * n
        self.watches: list[list[Clause]] = [[] for _ in range(2 * n)]
        self.clauses: list[Clause] = []
        self.learnts: list[Clause] = []

        self.activity = [self.rng.random() * 1e-5 for _ in range(n)] if cfg.rnd_init else [0.0] * n
        self.var_inc = 1.0
        self.var_decay = cfg.var_decay
        self.cla_inc = 1.0
        self.cla_decay = cfg.cla_decay
        self.order_heap = VarOrderHeap(self.activity, n)
        self.order_heap.build(range(n))

        self.polarity = [False] * n
        self.saved = [False] * n
        self.local_best = [False] * n
        self.user_pol = [-1] * n

        self.conflicts = 0
        self.conflictR = 0
        self.decisions = 0
        self.propagations = 0
        self.restarts = 0
        self.rephases = 0
        self.rephase_count = 0
        self.rephase_limit = 1024
        self.threshold = 0
        self.last_rephase_progress = 0.0
        self.last_restart_progress = 0.0
        self.curr_restarts = 0
        self.fast_avg = 0.0
        self.slow_avg = 0.0
        self.restart_count = 0
        self.restart_first = cfg.rfirst
        self.reductions = 0

        self.lbd_queue = [0] * LBD_CAPACITY
        self.lbd_queue_size = 0
        self.lbd_queue_pos = 0
        self.fast_lbd_sum = 0.0
        self.slow_lbd_sum = 0.0

        self.garbage_frac = cfg.gc_frac
        self.wasted_bytes = 0
        self.arena_bytes = 0
        self.max_learnts = float(max(self.num_clauses / 3, cfg.min_learnts))

        self.ok = True
        self.view = SolverView(self)
        self._load(formula)

    # -- setup ---------------------------------------------------------------
    def _load(self, formula: Formula) -> None:
        for raw in formula.clauses:
            lits = normalize_clause(raw)
            if lits is None:
                continue
            if not lits:
                self.ok = False
                return
            if len(lits) == 1:
                lit = lits[0]
                val = self.lit_val[lit]
                if val == 0:
                    self.ok = False
                    return
                if val == -1:
                    self._enqueue(lit, None)
                continue
            c = Clause(list(lits))
            self.clauses.append(c)
            self.arena_bytes += c.nbytes
            self._attach(c)

    def _attach(self, c: Clause) -> None:
        self.watches[c.lits[0]].append(c)
        self.watches[c.lits[1]].append(c)

    # -- assignment ----------------------------------------------------------
    def _enqueue(self, lit: int, reason: Clause | None) -> None:
        v = lit >> 1
        self.assigns[v] = (lit & 1) ^ 1
        self.lit_val[lit] = 1
        self.lit_val[lit ^ 1] = 0
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def var_value(self, v: int) -> int:
        """-1 when unassigned, else 0 or 1."""
        return self.assigns[v]

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def new_decision_level(self) -> None:
        self.trail_lim.append(len(self.trail))

    def cancel_until(self, level: int) -> None:
        if len(self.trail_lim) <= level:
            return
        trail, assigns, lit_val = self.trail, self.assigns, self.lit_val
        if len(trail) > self.threshold:
            local_best = self.local_best
            for lit in trail:
                local_best[lit >> 1] = not (lit & 1)
            self.threshold = len(trail)
        saved, polarity, reason, heap = self.saved, self.polarity, self.reason, self.order_heap
        stop = self.trail_lim[level]
        for i in range(len(trail) - 1, stop - 1, -1):
            lit = trail[i]
            v = lit >> 1
            phase = not (lit & 1)
            saved[v] = phase
            polarity[v] = phase
            assigns[v] = -1
            lit_val[lit] = -1
            lit_val[lit ^ 1] = -1
            reason[v] = None
            if v not in heap:
                heap.insert(v)
        del trail[stop:]
        del self.trail_lim[level:]
        self.qhead = stop

    # -- propagation ---------------------------------------------------------
    def propagate(self) -> Clause | None:
        """Unit propagation to fixpoint; returns a falsified clause or None."""
        trail, watches, lit_val = self.trail, self.watches, self.lit_val
        conflict = None
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                lits = c.lits
                if lits[0] == false_lit:
                    lits[0] = lits[1]
                    lits[1] = false_lit
                first = lits[0]
                if lit_val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(lits)):
                    if lit_val[lits[k]] != 0:
                        lits[1] = lits[k]
                        lits[k] = false_lit
                        watches[lits[1]].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if lit_val[first] == 0:
                        conflict = c
                        self.qhead = len(trail)
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                    else:
                        self._enqueue(first, c)
            del ws[j:]
            if conflict is not None:
                break
        return conflict

    # -- conflict analysis ---------------------------------------------------
    def analyze(self, confl: Clause) -> tuple[list[int], int, int]:
        """First-UIP learning; returns (learnt clause, backtrack level, lbd)."""
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        view = self.view
        dl = len(self.trail_lim)
        learnt = [-1]
        path = 0
        p = -1
        index = len(trail) - 1
        to_clear = []
        while True:
            if confl.learnt:
                self._slot = "cla_bump_activity"
                self._cla_bump(view, confl.idx)
            lits = confl.lits
            for q in (lits if p == -1 else lits[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    to_clear.append(v)
                    self._slot = "var_bump_activity"
                    self._var_bump(view, v, self.var_inc)
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[index] >> 1]:
                index -= 1
            p = trail[index]
            index -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        self._slot = None
        learnt[0] = p ^ 1
        if self.cfg.minimize and len(learnt) > 1:
            learnt = self._minimize(learnt)
        for v in to_clear:
            seen[v] = False

        if len(learnt) == 1:
            bt = 0
        else:
            best = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        return learnt, bt, lbd

    def _minimize(self, learnt: list[int]) -> list[int]:
        """Local minimisation: drop literals whose reason is subsumed by the clause."""
        seen, reason, level = self.seen, self.reason, self.level
        out = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None:
                out.append(q)
                continue
            if any(not seen[x >> 1] and level[x >> 1] > 0 for x in r.lits[1:]):
                out.append(q)
        return out

    # -- branching -----------------------------------------------------------
    def pick_branch_lit(self) -> int:
        """Next decision literal, or -1 when every variable is assigned."""
        assigns = self.assigns
        nxt = -1
        if self.cfg.rnd_freq > 0 and self.rng.random() < self.cfg.rnd_freq:
            free = [v for v in range(self.num_vars) if assigns[v] == -1]
            if free:
                nxt = free[self.rng.randrange(len(free))]
        heap = self.order_heap
        while nxt == -1 or assigns[nxt] != -1:
            if heap.empty():
                return -1
            nxt = heap.remove_max()
        return 2 * nxt + (0 if self.polarity[nxt] else 1)

    def rebuild_order_heap(self) -> None:
        self.order_heap.build(v for v in range(self.num_vars) if self.assigns[v] == -1)

    # -- clause database -----------------------------------------------------
    def _locked(self, c: Clause) -> bool:
        first = c.lits[0]
        return self.reason[first >> 1] is c and self.lit_val[first] == 1

    def reduce_db(self) -> None:
        learnts = self.learnts
        if not learnts:
            return
        order = sorted(learnts, key=lambda c: c.activity)
        half = len(order) // 2
        removed = 0
        for c in order[:half]:
            if len(c.lits) > 2 and not self._locked(c):
                c.removed = True
                self.wasted_bytes += c.nbytes
                removed += 1
        if removed:
            self.learnts = [c for c in learnts if not c.removed]
            for i, c in enumerate(self.learnts):
                c.idx = i
            for lit in range(2 * self.num_vars):
                ws = self.watches[lit]
                if any(c.removed for c in ws):
                    self.watches[lit] = [c for c in ws if not c.removed]
        self.reductions += 1
        if self.wasted_bytes > self.arena_bytes * self.garbage_frac:
            self.arena_bytes -= self.wasted_bytes
            self.wasted_bytes = 0

    def _learn(self, learnt: list[int], lbd: int) -> None:
        if len(learnt) == 1:
            self._enqueue(learnt[0], None)
            return
        c = Clause(learnt, learnt=True, lbd=lbd)
        c.idx = len(self.learnts)
        self.learnts.append(c)
        self.arena_bytes += c.nbytes
        self._attach(c)
        self._slot = "cla_bump_activity"
        self._cla_bump(self.view, c.idx)
        self._slot = None
        self._enqueue(learnt[0], c)

    def _record_lbd(self, lbd: int) -> None:
        self.conflicts += 1
        self.conflictR += 1
        self.rephases += 1
        size = min(max(int(self.lbd_queue_size), 0), LBD_CAPACITY)
        pos = int(self.lbd_queue_pos) % LBD_WINDOW
        if size >= LBD_WINDOW:
            self.fast_lbd_sum -= self.lbd_queue[pos]
            size = LBD_WINDOW
        else:
            size += 1
        self.lbd_queue[pos] = lbd
        self.fast_lbd_sum += lbd
        self.lbd_queue_size = size
        self.lbd_queue_pos = (pos + 1) % LBD_WINDOW
        self.slow_lbd_sum += min(lbd, LBD_WINDOW)

    # -- progress ------------------------------------------------------------
    def progress_estimate(self) -> float:
        n = self.num_vars
        if n == 0:
            return 1.0
        f = 1.0 / n
        progress = 0.0
        lim = self.trail_lim
        for i in range(len(lim) + 1):
            beg = 0 if i == 0 else lim[i - 1]
            end = len(self.trail) if i == len(lim) else lim[i]
            progress += math.pow(f, i) * (end - beg)
        return progress / n

    def check_reasons(self) -> bool:
        """Every implied literal is true and its reason is false elsewhere."""
        for lit in self.trail:
            r = self.reason[lit >> 1]
            if r is None:
                continue
            if r.lits[0] != lit or self.lit_val[lit] != 1:
                return False
            if any(self.lit_val[q] != 0 for q in r.lits[1:]):
                return False
        return True

    def stats(self) -> dict:
        return {
            "conflicts": self.conflicts,
            "decisions": self.decisions,
            "propagations": self.propagations,
            "restarts": self.restarts,
            "rephases": self.rephase_count,
            "reductions": self.reductions,
            "learnts": len(self.learnts),
        }

    # -- main loop -----------------------------------------------------------
    def _gates(self) -> None:
        view = self.view
        self._slot = "restart_condition"
        if self._restart_condition(view):
            self.restarts += 1
            self.curr_restarts += 1
            self._slot = "restart_function"
            self._restart_function(view)
        self._slot = "rephase_condition"
        if self._rephase_condition(view):
            self._slot = "rephase_function"
            self._rephase_function(view)
        self._slot = "reduce_condition"
        if self._reduce_condition(view):
            self._slot = None
            self.reduce_db()
            self.max_learnts *= 1.1
        self._slot = None

    def _search(self, deadline: float | None) -> str:
        if not self.ok:
            return UNSAT
        work_limit = self.cfg.work_limit
        debug = self.cfg.debug
        tick = 0
        while True:
            tick += 1
            if tick >= CHECK_EVERY:
                tick = 0
                if deadline is not None and time.perf_counter() > deadline:
                    return UNKNOWN
            if work_limit is not None and self.propagations > work_limit:
                return UNKNOWN
            confl = self.propagate()
            if debug and not self.check_reasons():
                raise AssertionError("reason invariant violated")
            if confl is not None:
                if not self.trail_lim:
                    return UNSAT
                learnt, bt, lbd = self.analyze(confl)
                self.cancel_until(bt)
                self._learn(learnt, lbd)
                self._record_lbd(lbd)
                self.var_inc /= self.var_decay
                self.cla_inc /= self.cla_decay
                self._gates()
            else:
                lit = self.pick_branch_lit()
                if lit == -1:
                    return SAT
                self.decisions += 1
                self.new_decision_level()
                self._enqueue(lit, None)

    def solve(self) -> SolveResult:
        start = time.perf_counter()
        deadline = start + self.cfg.timeout if self.cfg.timeout is not None else None
        try:
            status = self._search(deadline)
        except HookFault:
            raise
        except Exception as exc:
            if self._slot is None:
                raise
            raise HookFault(self._slot, f"{type(exc).__name__}: {exc}") from exc
        model = None
        if status == SAT:
            model = [a == 1 for a in self.assigns]
        return SolveResult(status, model, self.stats(), time.perf_counter() - start)


def solve(f: Formula, suite: HeuristicSuite | None = None, cfg: SolverConfig | None = None) -> SolveResult:
    return Solver(f, suite, cfg).solve()
