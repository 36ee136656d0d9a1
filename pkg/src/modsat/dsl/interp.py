"""Evaluation of checked heuristic programs against a solver view.

Programs are compiled once into nested closures and then run per call.
Arithmetic is 64-bit float unless both operands are integers, in which case
C semantics apply (truncating division and remainder). Every executed
statement costs one step; the per-call budget is
``10 * (num_vars + learnts_size) + 10_000``.
"""
from __future__ import annotations

import math
import operator

from ..hooks.view import ARRAYS, FIELDS, SLOT_KIND, SLOT_PARAMS
from .ast import (Assign, Binary, BoolLit, Call, Cast, Decl, ExprStmt, ForEach, If, Index, Name,
                  Num, Program, Return, RuntimeFault, Ternary, Unary)
from .checker import check, resolved_decl_types

STEP_BASE = 10_000
STEP_PER_ITEM = 10


class _Ctx:
    __slots__ = ("view", "env", "steps", "budget")

    def __init__(self, view, budget):
        self.view = view
        self.env = {}
        self.steps = 0
        self.budget = budget


def to_int(x) -> int:
    if isinstance(x, int):
        return x
    try:
        return int(x)
    except (ValueError, OverflowError):
        raise RuntimeFault("domain", f"cannot convert {x!r} to int") from None


def _convert(type_: str, x):
    if type_ == "int":
        return to_int(x)
    if type_ == "real":
        return float(x)
    return x


def _c_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _div(a, b):
    if b == 0:
        raise RuntimeFault("division-by-zero")
    if isinstance(a, int) and isinstance(b, int):
        return _c_div(a, b)
    return a / b


def _mod(a, b):
    if b == 0:
        raise RuntimeFault("division-by-zero", "remainder by zero")
    if isinstance(a, int) and isinstance(b, int):
        return a - b * _c_div(a, b)
    return math.fmod(a, b)


def _nanmin(*xs):
    for x in xs:
        if x != x:
            return x
    out = xs[0]
    for x in xs[1:]:
        if x < out:
            out = x
    return out


def _nanmax(*xs):
    for x in xs:
        if x != x:
            return x
    out = xs[0]
    for x in xs[1:]:
        if x > out:
            out = x
    return out


def _domain(fn, name):
    def wrapped(*args):
        try:
            return fn(*args)
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            raise RuntimeFault("domain", f"{name}{args!r}: {exc}") from None
    return wrapped


BUILTIN_FUNCS = {
    "min": _nanmin,
    "max": _nanmax,
    "abs": abs,
    "fabs": lambda x: abs(float(x)),
    "floor": _domain(lambda x: float(math.floor(x)) if math.isfinite(x) else float(x), "floor"),
    "ceil": _domain(lambda x: float(math.ceil(x)) if math.isfinite(x) else float(x), "ceil"),
    "sqrt": _domain(math.sqrt, "sqrt"),
    "log": _domain(math.log, "log"),
    "exp": _domain(math.exp, "exp"),
    "pow": _domain(math.pow, "pow"),
}

_ARITH = {
    "+": operator.add, "-": operator.sub, "*": operator.mul, "/": _div, "%": _mod,
    "<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge,
    "==": operator.eq, "!=": operator.ne,
}


def _index_check(arr, i):
    if not 0 <= i < len(arr):
        raise RuntimeFault("index", f"index {i} outside 0..{len(arr) - 1}")


class _Compiler:
    def __init__(self, program: Program):
        self.program = program
        self.decl_types = resolved_decl_types(program)
        self.scopes = [dict(zip(program.params, (t for _, t in SLOT_PARAMS[program.slot])))]

    def local_type(self, name):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    # -- statements ----------------------------------------------------------
    def block(self, stmts):
        self.scopes.append({})
        compiled = [self.stmt(s) for s in stmts]
        self.scopes.pop()
        if len(compiled) == 1:
            return compiled[0]

        def run(ctx):
            for s in compiled:
                r = s(ctx)
                if r is not None:
                    return r
            return None
        return run

    def stmt(self, s):
        body = self._stmt(s)

        def step(ctx):
            ctx.steps += 1
            if ctx.steps > ctx.budget:
                raise RuntimeFault("step-budget", f"exceeded {ctx.budget} steps")
            return body(ctx)
        return step

    def _stmt(self, s):
        if isinstance(s, Decl):
            type_ = self.decl_types.get(id(s), s.type or "real")
            value = self.expr(s.expr)
            name = s.name
            self.scopes[-1][name] = type_

            def decl(ctx):
                ctx.env[name] = _convert(type_, value(ctx))
            return decl
        if isinstance(s, Assign):
            return self.assign(s)
        if isinstance(s, If):
            cond = self.expr(s.cond)
            then = self.block(s.then)
            other = self.block(s.other) if s.other is not None else None

            def if_(ctx):
                if cond(ctx):
                    return then(ctx)
                if other is not None:
                    return other(ctx)
                return None
            return if_
        if isinstance(s, ForEach):
            name = s.var
            self.scopes.append({name: "int"})
            body = self.block(s.body)
            self.scopes.pop()
            if s.kind == "var":
                def count(view):
                    return view.num_vars
            else:
                def count(view):
                    return view.learnts_size

            def for_each(ctx):
                env = ctx.env
                for i in range(count(ctx.view)):
                    env[name] = i
                    r = body(ctx)
                    if r is not None:
                        return r
                return None
            return for_each
        if isinstance(s, Return):
            if s.expr is None:
                return lambda ctx: (None,)
            value = self.expr(s.expr)
            return lambda ctx: (value(ctx),)
        if isinstance(s, ExprStmt):
            e = self.expr(s.expr)

            def expr_stmt(ctx):
                e(ctx)
            return expr_stmt
        raise TypeError(f"unexpected statement {s!r}")

    def assign(self, s: Assign):
        value = self.expr(s.expr)
        op = None if s.op == "=" else _ARITH[s.op[0]]
        t = s.target
        if isinstance(t, Name):
            name = t.id
            local_t = self.local_type(name)
            if local_t is not None:
                def store(ctx):
                    v = value(ctx)
                    if op is not None:
                        v = op(ctx.env[name], v)
                    ctx.env[name] = _convert(local_t, v)
                return store
            field_t = FIELDS[name].type
            getter = operator.attrgetter(name)

            def store_field(ctx):
                v = value(ctx)
                if op is not None:
                    v = op(getter(ctx.view), v)
                setattr(ctx.view, name, _convert(field_t, v))
            return store_field
        arr_name = t.array
        elem_t = ARRAYS[arr_name].type
        index = self.expr(t.index)
        getter = operator.attrgetter(arr_name)

        def store_index(ctx):
            arr = getter(ctx.view)
            i = index(ctx)
            _index_check(arr, i)
            v = value(ctx)
            if op is not None:
                v = op(arr[i], v)
            arr[i] = _convert(elem_t, v)
        return store_index

    # -- expressions ---------------------------------------------------------
    def expr(self, e):
        if isinstance(e, Num):
            v = e.value
            return lambda ctx: v
        if isinstance(e, BoolLit):
            v = e.value
            return lambda ctx: v
        if isinstance(e, Name):
            name = e.id
            if self.local_type(name) is not None:
                return lambda ctx: ctx.env[name]
            getter = operator.attrgetter(name)
            if FIELDS[name].type == "real":  # hosts may hold whole numbers as int
                return lambda ctx: float(getter(ctx.view))
            return lambda ctx: getter(ctx.view)
        if isinstance(e, Index):
            getter = operator.attrgetter(e.array)
            index = self.expr(e.index)
            if ARRAYS[e.array].type == "real":
                def read_real(ctx):
                    arr = getter(ctx.view)
                    i = index(ctx)
                    _index_check(arr, i)
                    return float(arr[i])
                return read_real

            def read(ctx):
                arr = getter(ctx.view)
                i = index(ctx)
                _index_check(arr, i)
                return arr[i]
            return read
        if isinstance(e, Unary):
            operand = self.expr(e.operand)
            if e.op == "!":
                return lambda ctx: not operand(ctx)
            return lambda ctx: -operand(ctx)
        if isinstance(e, Binary):
            left, right = self.expr(e.left), self.expr(e.right)
            if e.op == "&&":
                return lambda ctx: left(ctx) and right(ctx)
            if e.op == "||":
                return lambda ctx: left(ctx) or right(ctx)
            fn = _ARITH[e.op]
            return lambda ctx: fn(left(ctx), right(ctx))
        if isinstance(e, Ternary):
            cond, a, b = self.expr(e.cond), self.expr(e.then), self.expr(e.other)
            return lambda ctx: a(ctx) if cond(ctx) else b(ctx)
        if isinstance(e, Cast):
            inner = self.expr(e.expr)
            type_ = e.type
            return lambda ctx: _convert(type_, inner(ctx))
        if isinstance(e, Call):
            args = [self.expr(a) for a in e.args]
            if e.func in BUILTIN_FUNCS:
                fn = BUILTIN_FUNCS[e.func]
                return lambda ctx: fn(*[a(ctx) for a in args])
            method = operator.attrgetter(e.func)
            if e.func == "heap_top":
                return _guard_heap_top
            if e.func in ("in_heap", "value", "is_decision", "heap_update", "heap_insert"):
                (arg,) = args

                def var_call(ctx):
                    v = arg(ctx)
                    if not 0 <= v < ctx.view.num_vars:
                        raise RuntimeFault("index", f"variable {v} outside 0..{ctx.view.num_vars - 1}")
                    return method(ctx.view)(v)
                return var_call
            if e.func == "cancel_until":
                (arg,) = args

                def cancel(ctx):
                    level = arg(ctx)
                    ctx.view.cancel_until(level if level > 0 else 0)
                return cancel
            return lambda ctx: method(ctx.view)(*[a(ctx) for a in args])
        raise TypeError(f"unexpected expression {e!r}")


def _guard_heap_top(ctx):
    try:
        return ctx.view.heap_top()
    except IndexError:
        raise RuntimeFault("domain", "heap is empty") from None


class CompiledProgram:
    """A checked program ready to run; call as ``prog(view, *args)``."""

    def __init__(self, program: Program):
        diags = check(program)
        if diags:
            raise ValueError("program does not check: " + "; ".join(map(str, diags)))
        self.program = program
        self.slot = program.slot
        self.kind = SLOT_KIND[program.slot]
        self._body = _Compiler(program).block(program.body)
        self._params = program.params
        self._param_types = [t for _, t in SLOT_PARAMS[program.slot]]

    def __call__(self, view, *args):
        budget = STEP_BASE + STEP_PER_ITEM * (view.num_vars + view.learnts_size)
        ctx = _Ctx(view, budget)
        if len(args) != len(self._params):
            raise TypeError(f"{self.slot} expects {len(self._params)} argument(s)")
        for name, t, value in zip(self._params, self._param_types, args):
            ctx.env[name] = _convert(t, value)
        r = self._body(ctx)
        if self.kind == "condition":
            if r is None:
                raise RuntimeFault("missing-return")
            return bool(r[0])
        return None


def interpret(program: Program, view, args=()):
    """Run ``program`` once against ``view``; raises :class:`RuntimeFault` on failure."""
    return CompiledProgram(program)(view, *args)
