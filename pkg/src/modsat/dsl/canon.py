"""Canonical forms used to detect synonymous heuristic programs.

Two programs are synonymous when their canonical texts are equal. The
canonical form renames locals in binding order, folds constant
subexpressions and orders commutative operands by a structural key. Operand
reordering is only done where it cannot change behaviour: never across
calls that consume randomness or mutate state, never when two operands may
fault, and for ``&&``/``||`` only when no operand may fault.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..hooks.view import IMPURE_CALLS
from .ast import (Assign, Binary, BoolLit, Call, Cast, Decl, ExprStmt, ForEach, If, Index, Name,
                  Num, Program, Return, RuntimeFault, Ternary, Unary)
from .checker import PARTIAL_BUILTINS, resolved_decl_types
from .interp import BUILTIN_FUNCS, _ARITH, _convert
from .parser import parse

COMMUTATIVE = {"+", "*", "==", "!="}
ASSOCIATIVE_BOOL = {"&&", "||"}
COMMUTATIVE_CALLS = {"min", "max"}


@dataclass(frozen=True)
class CanonicalForm:
    slot: str
    text: str

    def __str__(self) -> str:
        return self.text


# -- rendering ---------------------------------------------------------------

def _num(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    text = repr(float(v))
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def render_expr(e) -> str:
    if isinstance(e, Num):
        return _num(e.value) if e.value >= 0 else f"({_num(e.value)})"
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Index):
        return f"{e.array}[{render_expr(e.index)}]"
    if isinstance(e, Call):
        return f"{e.func}({', '.join(render_expr(a) for a in e.args)})"
    if isinstance(e, Unary):
        return f"{e.op}({render_expr(e.operand)})"
    if isinstance(e, Binary):
        return f"({render_expr(e.left)} {e.op} {render_expr(e.right)})"
    if isinstance(e, Ternary):
        return f"({render_expr(e.cond)} ? {render_expr(e.then)} : {render_expr(e.other)})"
    if isinstance(e, Cast):
        return f"{e.type}({render_expr(e.expr)})"
    raise TypeError(f"unexpected expression {e!r}")


def _render_block(stmts, indent: int, out: list) -> None:
    for s in stmts:
        _render_stmt(s, indent, out)


def _render_stmt(s, indent: int, out: list) -> None:
    pad = "  " * indent
    if isinstance(s, Decl):
        kw = s.type if s.type else "let"
        out.append(f"{pad}{kw} {s.name} = {render_expr(s.expr)};")
    elif isinstance(s, Assign):
        target = s.target.id if isinstance(s.target, Name) else render_expr(s.target)
        out.append(f"{pad}{target} {s.op} {render_expr(s.expr)};")
    elif isinstance(s, If):
        out.append(f"{pad}if ({render_expr(s.cond)}) {{")
        _render_block(s.then, indent + 1, out)
        if s.other is not None:
            out.append(f"{pad}}} else {{")
            _render_block(s.other, indent + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(s, ForEach):
        out.append(f"{pad}for_each_{s.kind}({s.var}) {{")
        _render_block(s.body, indent + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(s, Return):
        out.append(f"{pad}return;" if s.expr is None else f"{pad}return {render_expr(s.expr)};")
    elif isinstance(s, ExprStmt):
        out.append(f"{pad}{render_expr(s.expr)};")
    else:
        raise TypeError(f"unexpected statement {s!r}")


def render(program: Program) -> str:
    """Pretty-print a program as parseable source with a function header."""
    out = [f"{program.slot}({', '.join(program.params)}) {{"]
    _render_block(program.body, 1, out)
    out.append("}")
    return "\n".join(out) + "\n"


# -- purity analysis ---------------------------------------------------------

def _impure(e) -> bool:
    if isinstance(e, Call):
        return e.func in IMPURE_CALLS or any(_impure(a) for a in e.args)
    return any(_impure(c) for c in _children(e))


def _may_fault(e) -> bool:
    if isinstance(e, Index):
        return True
    if isinstance(e, Binary) and e.op in ("/", "%"):
        return True
    if isinstance(e, Cast) and e.type == "int":
        return True
    if isinstance(e, Call) and (e.func in PARTIAL_BUILTINS or e.func in
                                ("in_heap", "value", "is_decision", "heap_top")):
        return True
    return any(_may_fault(c) for c in _children(e))


def _children(e):
    if isinstance(e, (Num, BoolLit, Name)):
        return ()
    if isinstance(e, Index):
        return (e.index,)
    if isinstance(e, Call):
        return e.args
    if isinstance(e, Unary):
        return (e.operand,)
    if isinstance(e, Binary):
        return (e.left, e.right)
    if isinstance(e, Ternary):
        return (e.cond, e.then, e.other)
    if isinstance(e, Cast):
        return (e.expr,)
    raise TypeError(f"unexpected expression {e!r}")


def _sortable(operands, short_circuit: bool) -> bool:
    """Reordering is safe for pure operands; with short-circuiting they must also never fault.

    Strict operators evaluate every operand, so a reorder can only change
    which fault is reported, never whether one happens.
    """
    if any(_impure(o) for o in operands):
        return False
    return not short_circuit or not any(_may_fault(o) for o in operands)


# -- canonicalisation --------------------------------------------------------

def _literal(e):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, BoolLit):
        return e.value
    return None


def _const(value):
    if isinstance(value, bool):
        return BoolLit(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return Num(value)


def _flatten(op, e, out):
    if isinstance(e, Binary) and e.op == op:
        _flatten(op, e.left, out)
        _flatten(op, e.right, out)
    else:
        out.append(e)


class _Canon:
    def __init__(self, program: Program):
        self.decl_types = resolved_decl_types(program)
        self.scopes: list[dict] = [{}]
        self.counter = 0

    def fresh(self, name: str, prefix: str = "l") -> str:
        new = f"_{prefix}{self.counter}"
        self.counter += 1
        self.scopes[-1][name] = new
        return new

    def rename(self, name: str) -> str:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return name

    def block(self, stmts) -> tuple:
        self.scopes.append({})
        out = tuple(self.stmt(s) for s in stmts)
        self.scopes.pop()
        return out

    def stmt(self, s):
        if isinstance(s, Decl):
            e = self.expr(s.expr)
            type_ = self.decl_types.get(id(s)) or s.type
            return Decl(type_, self.fresh(s.name), e)
        if isinstance(s, Assign):
            t = s.target
            target = Name(self.rename(t.id)) if isinstance(t, Name) else Index(t.array, self.expr(t.index))
            return Assign(target, s.op, self.expr(s.expr))
        if isinstance(s, If):
            cond = self.expr(s.cond)
            return If(cond, self.block(s.then), self.block(s.other) if s.other is not None else None)
        if isinstance(s, ForEach):
            self.scopes.append({})
            var = self.fresh(s.var)
            body = self.block(s.body)
            self.scopes.pop()
            return ForEach(s.kind, var, body)
        if isinstance(s, Return):
            return Return(self.expr(s.expr) if s.expr is not None else None)
        if isinstance(s, ExprStmt):
            return ExprStmt(self.expr(s.expr))
        raise TypeError(f"unexpected statement {s!r}")

    def expr(self, e):
        if isinstance(e, (Num, BoolLit)):
            return replace(e)
        if isinstance(e, Name):
            return Name(self.rename(e.id))
        if isinstance(e, Index):
            return Index(e.array, self.expr(e.index))
        if isinstance(e, Unary):
            operand = self.expr(e.operand)
            lit = _literal(operand)
            if lit is not None:
                folded = _const((not lit) if e.op == "!" else -lit)
                if folded is not None:
                    return folded
            return Unary(e.op, operand)
        if isinstance(e, Cast):
            inner = self.expr(e.expr)
            lit = _literal(inner)
            if lit is not None:
                try:
                    folded = _const(_convert(e.type, lit))
                except RuntimeFault:
                    folded = None
                if folded is not None:
                    return folded
            return Cast(e.type, inner)
        if isinstance(e, Ternary):
            cond = self.expr(e.cond)
            a, b = self.expr(e.then), self.expr(e.other)
            if isinstance(cond, BoolLit) and _same_type(a, b):
                return a if cond.value else b
            return Ternary(cond, a, b)
        if isinstance(e, Call):
            args = tuple(self.expr(a) for a in e.args)
            lits = [_literal(a) for a in args]
            if e.func in BUILTIN_FUNCS and args and all(l is not None and not isinstance(l, bool)
                                                        for l in lits):
                try:
                    folded = _const(BUILTIN_FUNCS[e.func](*lits))
                except RuntimeFault:
                    folded = None
                if folded is not None:
                    return folded
            if e.func in COMMUTATIVE_CALLS and _sortable(args, short_circuit=False):
                args = tuple(sorted(args, key=render_expr))
            return Call(e.func, args)
        if isinstance(e, Binary):
            return self.binary(e)
        raise TypeError(f"unexpected expression {e!r}")

    def binary(self, e: Binary):
        op = e.op
        if op in ASSOCIATIVE_BOOL:
            parts: list = []
            _flatten(op, e, parts)
            # Operands can fold into the same operator (``(a || b) && true``),
            # so flatten again after canonicalising them.
            canon_parts: list = []
            for p in parts:
                _flatten(op, self.expr(p), canon_parts)
            parts = canon_parts
            # Constant operands: drop neutral ones, stop at an absorbing one
            # (only when everything before it is pure and total).
            neutral = op == "&&"
            kept = []
            for p in parts:
                if isinstance(p, BoolLit):
                    if p.value == neutral:
                        continue
                    if _sortable(kept, short_circuit=True):
                        return BoolLit(not neutral)
                kept.append(p)
            if not kept:
                return BoolLit(neutral)
            if _sortable(kept, short_circuit=True):
                kept = _dedupe(sorted(kept, key=render_expr))
            out = kept[0]
            for p in kept[1:]:
                out = Binary(op, out, p)
            return out
        left, right = self.expr(e.left), self.expr(e.right)
        a, b = _literal(left), _literal(right)
        if a is not None and b is not None and not isinstance(a, bool) and not isinstance(b, bool):
            try:
                folded = _const(_ARITH[op](a, b))
            except RuntimeFault:
                folded = None
            if folded is not None:
                return folded
        if isinstance(left, BoolLit) and isinstance(right, BoolLit) and op in ("==", "!="):
            return BoolLit((left.value == right.value) == (op == "=="))
        if op in COMMUTATIVE and _sortable((left, right), short_circuit=False):
            if render_expr(right) < render_expr(left):
                left, right = right, left
        return Binary(op, left, right)


def _dedupe(parts):
    out = []
    for p in parts:
        if not out or out[-1] != p:
            out.append(p)
    return out


def _same_type(a, b) -> bool:
    la, lb = _literal(a), _literal(b)
    if la is None or lb is None:
        return False
    return type(la) is type(lb)


def canonical_program(program: Program) -> Program:
    c = _Canon(program)
    params = tuple(c.fresh(p, "p") for p in program.params)
    body = c.block(program.body)
    return Program(program.slot, params, body)


def canonicalize(program: Program) -> CanonicalForm:
    return CanonicalForm(program.slot, render(canonical_program(program)))


def canonicalize_text(text: str, slot: str) -> CanonicalForm:
    return canonicalize(parse(text, slot))


def is_synonymous(a: Program, b: Program, judge=None) -> bool:
    """True when ``a`` and ``b`` share a canonical form.

    ``judge`` is an optional second opinion ``judge(text_a, text_b) -> bool``
    consulted only when the canonical forms differ.
    """
    if a.slot != b.slot:
        return False
    ca, cb = canonicalize(a), canonicalize(b)
    if ca == cb:
        return True
    return bool(judge(ca.text, cb.text)) if judge is not None else False
