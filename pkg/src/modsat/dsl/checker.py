"""Static checks: slot signature, identifiers, capabilities and types."""
from __future__ import annotations

from ..hooks.view import ARRAYS, CALLS, CONDITION, FIELDS, SLOT_KIND, SLOT_PARAMS
from .ast import (Assign, Binary, BoolLit, Call, Cast, Decl, Diagnostic, ExprStmt, ForEach, If,
                  Index, Name, Num, Program, Return, Ternary, Unary)

NUMERIC = ("int", "real")

# name -> (min args, max args or None); result type computed in _call
BUILTINS = {
    "min": (2, None), "max": (2, None), "abs": (1, 1), "fabs": (1, 1),
    "floor": (1, 1), "ceil": (1, 1), "sqrt": (1, 1), "log": (1, 1), "exp": (1, 1),
    "pow": (2, 2),
}

# Builtins that can raise a domain fault at run time.
PARTIAL_BUILTINS = frozenset({"sqrt", "log", "exp", "pow"})


def _join(a: str, b: str) -> str:
    return "int" if a == b == "int" else "real"


class Checker:
    def __init__(self, program: Program):
        self.program = program
        self.kind = SLOT_KIND[program.slot]
        self.diags: list[Diagnostic] = []
        self.scopes: list[dict] = []
        self.readonly: set[str] = set()
        self.decl_types: dict[int, str] = {}

    def report(self, code: str, message: str, node) -> None:
        pos = getattr(node, "pos", None)
        self.diags.append(Diagnostic(code, message, pos.line if pos else 0, pos.col if pos else 0))

    # -- scopes --------------------------------------------------------------
    def lookup(self, name: str) -> str | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def bind(self, name: str, type_: str, node) -> None:
        if name in FIELDS or name in ARRAYS or name in CALLS or name in BUILTINS:
            self.report("shadowing", f"{name!r} is a solver name and cannot be redeclared", node)
        elif self.lookup(name) is not None:
            self.report("redeclared", f"{name!r} is already declared", node)
        self.scopes[-1][name] = type_

    # -- program -------------------------------------------------------------
    def run(self) -> list[Diagnostic]:
        prog = self.program
        self.scopes.append({})
        for name, (_, type_) in zip(prog.params, SLOT_PARAMS[prog.slot]):
            self.bind(name, type_, prog)
        self.block(prog.body)
        self.scopes.pop()
        if self.kind == CONDITION and not _returns(prog.body):
            self.report("missing-return", f"{prog.slot} must return a bool on every path", prog)
        return self.diags

    def block(self, stmts) -> None:
        self.scopes.append({})
        for s in stmts:
            self.stmt(s)
        self.scopes.pop()

    def stmt(self, s) -> None:
        if isinstance(s, Decl):
            t = self.expr(s.expr)
            declared = s.type or t
            if declared == "void" or t == "void":
                self.report("type", "cannot declare a void value", s)
                declared = "real"
            elif t is not None and not _assignable(declared, t):
                self.report("type", f"cannot initialise {declared} {s.name!r} with {t}", s)
            self.decl_types[id(s)] = declared or "real"
            self.bind(s.name, declared or "real", s)
        elif isinstance(s, Assign):
            target_t = self.target(s.target)
            t = self.expr(s.expr)
            if target_t is None or t is None:
                return
            if s.op != "=":
                if target_t not in NUMERIC or t not in NUMERIC:
                    self.report("type", f"{s.op} needs numeric operands", s)
            elif not _assignable(target_t, t):
                self.report("type", f"cannot assign {t} to {target_t}", s)
        elif isinstance(s, If):
            self.want(s.cond, "bool", "if condition")
            self.block(s.then)
            if s.other is not None:
                self.block(s.other)
        elif isinstance(s, ForEach):
            self.scopes.append({})
            self.bind(s.var, "int", s)
            self.readonly.add(s.var)
            self.block(s.body)
            self.readonly.discard(s.var)
            self.scopes.pop()
        elif isinstance(s, Return):
            if self.kind == CONDITION:
                if s.expr is None:
                    self.report("return-type", f"{self.program.slot} must return a bool", s)
                else:
                    self.want(s.expr, "bool", "return value")
            elif s.expr is not None:
                self.report("return-type", f"{self.program.slot} returns nothing", s)
        elif isinstance(s, ExprStmt):
            if not isinstance(s.expr, Call):
                self.report("syntax", "expression statement has no effect", s)
            self.expr(s.expr)

    def target(self, t) -> str | None:
        if isinstance(t, Name):
            local = self.lookup(t.id)
            if local is not None:
                if t.id in self.readonly:
                    self.report("illegal-write", f"loop variable {t.id!r} is read-only", t)
                return local
            spec = FIELDS.get(t.id)
            if spec is None:
                self.report("unknown-identifier", f"unknown identifier {t.id!r}", t)
                return None
            if self.kind not in spec.writable_in:
                self.report("illegal-write", f"{t.id!r} is not writable in {self.program.slot}", t)
            return spec.type
        spec = ARRAYS.get(t.array)
        if spec is None:
            self.report("unknown-identifier", f"unknown array {t.array!r}", t)
            self.expr(t.index)
            return None
        self.want(t.index, "int", "index")
        if self.kind not in spec.writable_in:
            self.report("illegal-write", f"{t.array!r} is not writable in {self.program.slot}", t)
        return spec.type

    def want(self, e, type_: str, what: str) -> None:
        t = self.expr(e)
        if t is not None and t != type_:
            self.report("type", f"{what} must be {type_}, got {t}", e)

    def expr(self, e) -> str | None:
        if isinstance(e, Num):
            return "int" if e.is_int else "real"
        if isinstance(e, BoolLit):
            return "bool"
        if isinstance(e, Name):
            local = self.lookup(e.id)
            if local is not None:
                return local
            if e.id in FIELDS:
                return FIELDS[e.id].type
            if e.id in ARRAYS:
                self.report("type", f"array {e.id!r} needs an index", e)
                return None
            self.report("unknown-identifier", f"unknown identifier {e.id!r}", e)
            return None
        if isinstance(e, Index):
            spec = ARRAYS.get(e.array)
            self.want(e.index, "int", "index")
            if spec is None:
                self.report("unknown-identifier", f"unknown array {e.array!r}", e)
                return None
            return spec.type
        if isinstance(e, Unary):
            t = self.expr(e.operand)
            if t is None:
                return None
            if e.op == "!":
                if t != "bool":
                    self.report("type", f"'!' needs bool, got {t}", e)
                return "bool"
            if t not in NUMERIC:
                self.report("type", f"unary '-' needs a number, got {t}", e)
                return "real"
            return t
        if isinstance(e, Binary):
            return self._binary(e)
        if isinstance(e, Ternary):
            self.want(e.cond, "bool", "condition")
            a, b = self.expr(e.then), self.expr(e.other)
            if a is None or b is None:
                return a or b
            if a == b:
                return a
            if a in NUMERIC and b in NUMERIC:
                return "real"
            self.report("type", f"branches have types {a} and {b}", e)
            return a
        if isinstance(e, Cast):
            t = self.expr(e.expr)
            if e.type == "bool" and t not in (None, "bool"):
                self.report("type", f"cannot cast {t} to bool", e)
            elif e.type in NUMERIC and t not in (None, *NUMERIC):
                self.report("type", f"cannot cast {t} to {e.type}", e)
            return e.type
        if isinstance(e, Call):
            return self._call(e)
        raise TypeError(f"unexpected node {e!r}")

    def _binary(self, e: Binary) -> str | None:
        a, b = self.expr(e.left), self.expr(e.right)
        op = e.op
        if op in ("&&", "||"):
            for side, t in ((e.left, a), (e.right, b)):
                if t is not None and t != "bool":
                    self.report("type", f"{op!r} needs bool operands, got {t}", side)
            return "bool"
        if a is None or b is None:
            return "bool" if op in ("==", "!=", "<", "<=", ">", ">=") else None
        if op in ("==", "!="):
            if not (a == b or (a in NUMERIC and b in NUMERIC)):
                self.report("type", f"cannot compare {a} with {b}", e)
            return "bool"
        if a not in NUMERIC or b not in NUMERIC:
            self.report("type", f"{op!r} needs numeric operands, got {a} and {b}", e)
            return "bool" if op in ("<", "<=", ">", ">=") else "real"
        if op in ("<", "<=", ">", ">="):
            return "bool"
        return _join(a, b)

    def _call(self, e: Call) -> str | None:
        arg_types = [self.expr(a) for a in e.args]
        if e.func in BUILTINS:
            lo, hi = BUILTINS[e.func]
            if len(e.args) < lo or (hi is not None and len(e.args) > hi):
                self.report("arity", f"{e.func} takes {lo}{'+' if hi is None else ''} argument(s)", e)
            for a, t in zip(e.args, arg_types):
                if t is not None and t not in NUMERIC:
                    self.report("type", f"{e.func} needs numeric arguments, got {t}", a)
            if e.func in ("min", "max"):
                return "int" if all(t == "int" for t in arg_types) else "real"
            if e.func == "abs":
                return arg_types[0] if arg_types and arg_types[0] in NUMERIC else "real"
            return "real"
        spec = CALLS.get(e.func)
        if spec is None:
            self.report("unknown-function", f"unknown function {e.func!r} (new functions are not allowed)", e)
            return None
        if self.kind not in spec.allowed_in:
            self.report("capability", f"{e.func} cannot be called from {self.program.slot}", e)
        if len(e.args) != len(spec.args):
            self.report("arity", f"{e.func} takes {len(spec.args)} argument(s)", e)
        for a, t, want in zip(e.args, arg_types, spec.args):
            if t is not None and t != want:
                self.report("type", f"{e.func} argument must be {want}, got {t}", a)
        return spec.returns


def _assignable(target: str, value: str) -> bool:
    if target == value:
        return True
    return target in NUMERIC and value in NUMERIC


def _returns(stmts) -> bool:
    for s in stmts:
        if isinstance(s, Return):
            return True
        if isinstance(s, If) and s.other is not None and _returns(s.then) and _returns(s.other):
            return True
    return False


def check(program: Program) -> list[Diagnostic]:
    """Return the list of diagnostics; an empty list means the program is valid."""
    return Checker(program).run()


def resolved_decl_types(program: Program) -> dict[int, str]:
    c = Checker(program)
    c.run()
    return c.decl_types
