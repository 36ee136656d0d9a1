"""CNF formulas, DIMACS I/O and assignment evaluation.

Literals are encoded MiniSat style: ``2 * var + neg`` with 0-based variables.
The 1-based DIMACS numbering only exists at the parser/writer boundary.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

SATISFIED = "satisfied"
FALSIFIED = "falsified"
UNDETERMINED = "undetermined"


class DimacsError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def mk_lit(var: int, neg: bool = False) -> int:
    return (var << 1) | int(neg)


def lit_var(lit: int) -> int:
    return lit >> 1


def lit_neg(lit: int) -> bool:
    return bool(lit & 1)


def from_dimacs(x: int) -> int:
    return mk_lit(abs(x) - 1, x < 0)


def to_dimacs(lit: int) -> int:
    v = (lit >> 1) + 1
    return -v if lit & 1 else v


@dataclass(frozen=True)
class Literal:
    """Readable view of an encoded literal (``var`` is 0-based)."""

    var: int
    negated: bool = False

    def __post_init__(self):
        if self.var < 0:
            raise ValueError("variable index must be non-negative")

    def __invert__(self) -> "Literal":
        return Literal(self.var, not self.negated)

    @property
    def code(self) -> int:
        return mk_lit(self.var, self.negated)

    @classmethod
    def from_code(cls, lit: int) -> "Literal":
        return cls(lit >> 1, bool(lit & 1))


def normalize_clause(lits: Iterable[int]) -> tuple[int, ...] | None:
    """Drop duplicate literals, keeping first occurrence; None for a tautology."""
    seen: set[int] = set()
    out = []
    for lit in lits:
        if lit ^ 1 in seen:
            return None
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    return tuple(out)


@dataclass(frozen=True)
class Formula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    tautologies_dropped: int = 0
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be >= 0")
        for clause in self.clauses:
            for lit in clause:
                if lit < 0 or (lit >> 1) >= self.num_vars:
                    raise ValueError(f"literal {lit} out of range for {self.num_vars} vars")

    @classmethod
    def from_dimacs_clauses(cls, num_vars: int, clauses: Iterable[Sequence[int]]) -> "Formula":
        """Build from signed 1-based clauses, applying the same normalization as the parser."""
        kept = []
        dropped = 0
        for c in clauses:
            norm = normalize_clause(from_dimacs(x) for x in c)
            if norm is None:
                dropped += 1
            else:
                kept.append(norm)
        return cls(num_vars, tuple(kept), dropped)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def dimacs_clauses(self) -> list[list[int]]:
        return [[to_dimacs(l) for l in c] for c in self.clauses]


def parse_dimacs(text: str, strict: bool = False) -> Formula:
    """Parse DIMACS CNF text.

    A clause-count mismatch against the header is tolerated (recorded in
    ``Formula.warnings``) unless ``strict`` is set.
    """
    num_vars = None
    declared = 0
    clauses: list[tuple[int, ...]] = []
    dropped = 0
    current: list[int] = []
    seen_clauses = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if num_vars < 0 or declared < 0:
                raise DimacsError(f"malformed header {line!r}", lineno)
            continue
        if line.startswith("%"):
            # SATLIB end-of-data marker
            break
        if num_vars is None:
            raise DimacsError("clause data before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                x = int(tok)
            except ValueError:
                raise DimacsError(f"non-integer token {tok!r}", lineno) from None
            if x == 0:
                seen_clauses += 1
                norm = normalize_clause(current)
                if norm is None:
                    dropped += 1
                else:
                    clauses.append(norm)
                current = []
            else:
                if abs(x) > num_vars:
                    raise DimacsError(f"literal {x} exceeds declared {num_vars} variables", lineno)
                current.append(from_dimacs(x))
    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("missing terminating 0 at end of input")
    warnings = []
    if seen_clauses != declared:
        msg = f"header declares {declared} clauses, found {seen_clauses}"
        if strict:
            raise DimacsError(msg)
        warnings.append(msg)
    return Formula(num_vars, tuple(clauses), dropped, tuple(warnings))


def write_dimacs(f: Formula) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    for c in f.clauses:
        lines.append(" ".join(str(to_dimacs(l)) for l in c) + " 0" if c else "0")
    return "\n".join(lines) + "\n"


def _lit_value(lit: int, a) -> bool | None:
    v = a.get(lit >> 1) if isinstance(a, Mapping) else (a[lit >> 1] if (lit >> 1) < len(a) else None)
    if v is None:
        return None
    return (not v) if lit & 1 else bool(v)


def evaluate(f: Formula, a: Mapping[int, bool | None] | Sequence[bool | None]) -> str:
    """Classify ``f`` under a (partial) assignment keyed by 0-based variable."""
    undetermined = False
    for clause in f.clauses:
        sat = False
        open_ = False
        for lit in clause:
            val = _lit_value(lit, a)
            if val is None:
                open_ = True
            elif val:
                sat = True
                break
        if sat:
            continue
        if not open_:
            return FALSIFIED
        undetermined = True
    return UNDETERMINED if undetermined else SATISFIED
