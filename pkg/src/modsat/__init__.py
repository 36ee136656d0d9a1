"""Modular CDCL SAT solver with pluggable heuristics and a search stack around it."""
from __future__ import annotations

from .cnf import Formula, evaluate, parse_dimacs, write_dimacs
from .hooks import HeuristicSuite, HookFault
from .solver import SAT, UNKNOWN, UNSAT, SolveResult, Solver, SolverConfig, solve

__version__ = "0.1.0"

__all__ = [
    "SAT", "UNKNOWN", "UNSAT", "Formula", "HeuristicSuite", "HookFault", "SolveResult", "Solver",
    "SolverConfig", "evaluate", "parse_dimacs", "solve", "write_dimacs",
]
