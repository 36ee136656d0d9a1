"""Syntax tree for heuristic programs. Positions never take part in equality."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Pos:
    line: int = 0
    col: int = 0


_NOPOS = Pos()


def _pos():
    return field(default=_NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    value: Union[int, float]
    pos: Pos = _pos()

    @property
    def is_int(self) -> bool:
        return isinstance(self.value, int)


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: Pos = _pos()


@dataclass(frozen=True)
class Name:
    id: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Index:
    array: str
    index: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Cast:
    type: str  # "int" | "real" | "bool"
    expr: "Expr"
    pos: Pos = _pos()


Expr = Union[Num, BoolLit, Name, Index, Call, Unary, Binary, Ternary, Cast]


@dataclass(frozen=True)
class Decl:
    type: Optional[str]  # None for ``let``
    name: str
    expr: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assign:
    target: Union[Name, Index]
    op: str  # "=", "+=", "-=", "*=", "/="
    expr: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    other: Optional[tuple]
    pos: Pos = _pos()


@dataclass(frozen=True)
class ForEach:
    kind: str  # "var" | "learnt"
    var: str
    body: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class Return:
    expr: Optional[Expr]
    pos: Pos = _pos()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    pos: Pos = _pos()


Stmt = Union[Decl, Assign, If, ForEach, Return, ExprStmt]


@dataclass(frozen=True)
class Program:
    slot: str
    params: tuple  # parameter names, arity fixed by the slot
    body: tuple
    source: str = field(default="", compare=False, repr=False)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: [{self.code}] {self.message}"


class DslError(Exception):
    """Lexing or parsing failed; ``diagnostics`` is machine readable."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class RuntimeFault(Exception):
    """A checked program failed while running (division by zero, budget, domain)."""

    def __init__(self, kind: str, message: str = ""):
        self.kind = kind
        super().__init__(f"{kind}: {message}" if message else kind)
