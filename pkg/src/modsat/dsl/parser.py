"""Lexer and recursive-descent parser for heuristic programs.

The surface syntax is a small C-like subset so that code written for the
C++ solver needs little or no translation::

    bool restart_condition() {
        if (conflicts <= 0) return false;
        double avg = fast_lbd_sum / lbd_queue_size;
        return conflictR >= restart_first * avg;
    }

The function header is optional; without it the text is the body.
"""
from __future__ import annotations

import re

from ..hooks.view import SLOT_PARAMS, SLOTS
from .ast import (Assign, Binary, BoolLit, Call, Cast, Decl, Diagnostic, DslError, ExprStmt,
                  ForEach, If, Index, Name, Num, Pos, Program, Return, Ternary, Unary)

KEYWORDS = {"if", "else", "return", "let", "true", "false", "for_each_var", "for_each_learnt"}
TYPE_WORDS = {"int": "int", "long": "int", "double": "real", "float": "real", "real": "real",
              "bool": "bool", "void": "void", "auto": None}

SLOT_ALIASES = {
    "varBumpActivity": "var_bump_activity",
    "claBumpActivity": "cla_bump_activity",
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<real>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>(?:std::)?[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>&&|\|\||==|!=|<=|>=|\+=|-=|\*=|/=|\+\+|--|[-+*/%<>!=?:(){}\[\],;&])
""", re.VERBOSE | re.DOTALL)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    n = len(source)
    while i < n:
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise DslError([Diagnostic("lex", f"unexpected character {source[i]!r}",
                                       line, i - line_start + 1)])
        kind = m.lastgroup
        text = m.group()
        col = i - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "bcomment":
            line += text.count("\n")
            if "\n" in text:
                line_start = i + text.rfind("\n") + 1
        elif kind == "ident":
            if text.startswith("std::"):
                text = text[5:]
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, line, col))
        elif kind in ("int", "real", "op"):
            tokens.append(Token(kind, text, line, col))
        i = m.end()
    tokens.append(Token("eof", "", line, i - line_start + 1))
    return tokens


class Parser:
    def __init__(self, source: str, slot: str):
        self.tokens = tokenize(source)
        self.i = 0
        self.slot = slot

    # -- token helpers -------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, message: str, tok: Token | None = None, code: str = "syntax"):
        tok = tok or self.tok
        raise DslError([Diagnostic(code, message, tok.line, tok.col)])

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("op", "kw")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def pos(self, tok: Token | None = None) -> Pos:
        tok = tok or self.tok
        return Pos(tok.line, tok.col)

    # -- program -------------------------------------------------------------
    def program(self) -> Program:
        params = tuple(name for name, _ in SLOT_PARAMS[self.slot])
        header = self._header_start()
        if header is not None:
            self.i = header
            params = self._params()
            self.expect("{")
            body = self._stmts_until("}")
            self.expect("}")
        else:
            body = self._stmts_until(None)
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r} after end of program")
        return Program(self.slot, params, tuple(body))

    def _header_start(self) -> int | None:
        """Index just past the slot name if the source opens with a function header."""
        j = self.i
        t = self.tokens[j]
        if t.kind == "ident" and t.text in TYPE_WORDS:
            j += 1
        t = self.tokens[j]
        if t.kind == "ident" and t.text == "Solver" and self.tokens[j + 1].text == ":":
            j += 3 if self.tokens[j + 2].text == ":" else 0
        t = self.tokens[j]
        if t.kind == "ident" and SLOT_ALIASES.get(t.text, t.text) == self.slot \
                and self.tokens[j + 1].text == "(":
            return j + 1
        return None

    def _params(self) -> tuple:
        self.expect("(")
        names = []
        while not self.at(")"):
            if self.tok.kind == "ident" and self.tok.text in TYPE_WORDS:
                self.i += 1
            if self.tok.kind == "ident" and self.tok.text in ("Var", "Clause", "CRef"):
                self.i += 1
            self.accept("&")
            if self.tok.kind != "ident":
                self.error("expected parameter name")
            names.append(self.tok.text)
            self.i += 1
            if not self.accept(","):
                break
        self.expect(")")
        expected = len(SLOT_PARAMS[self.slot])
        if len(names) != expected:
            self.error(f"{self.slot} takes {expected} parameter(s), got {len(names)}", code="arity")
        return tuple(names)

    # -- statements ----------------------------------------------------------
    def _stmts_until(self, closer: str | None) -> list:
        out = []
        while not (self.tok.kind == "eof" or (closer is not None and self.at(closer))):
            out.append(self.statement())
        if closer is not None and self.tok.kind == "eof":
            self.error(f"missing {closer!r}")
        return out

    def block(self) -> tuple:
        if self.accept("{"):
            body = self._stmts_until("}")
            self.expect("}")
            return tuple(body)
        return (self.statement(),)

    def statement(self):
        t = self.tok
        p = self.pos()
        if t.kind == "kw":
            if t.text == "if":
                self.i += 1
                self.expect("(")
                cond = self.expr()
                self.expect(")")
                then = self.block()
                other = None
                if self.accept("else"):
                    other = self.block()
                return If(cond, then, other, p)
            if t.text == "return":
                self.i += 1
                if self.accept(";"):
                    return Return(None, p)
                e = self.expr()
                self.expect(";")
                return Return(e, p)
            if t.text in ("for_each_var", "for_each_learnt"):
                self.i += 1
                self.expect("(")
                if self.tok.kind != "ident":
                    self.error("expected loop variable name")
                name = self.tok.text
                self.i += 1
                self.expect(")")
                return ForEach("var" if t.text == "for_each_var" else "learnt", name, self.block(), p)
            if t.text == "let":
                self.i += 1
                return self._decl(None, p)
        if t.kind == "op" and t.text == ";":
            self.error("empty statement")
        if t.kind == "ident" and t.text in TYPE_WORDS and self.peek().kind == "ident":
            type_ = TYPE_WORDS[t.text]
            if type_ == "void":
                self.error("'void' is not a variable type", code="type")
            self.i += 1
            if self.at("(") or self.peek().text == "(":
                self.error("defining new functions is not allowed", code="new-function")
            return self._decl(type_, p)
        if t.kind == "op" and t.text in ("++", "--"):
            self.i += 1
            target = self._target()
            self.expect(";")
            return Assign(target, "+=" if t.text == "++" else "-=", Num(1), p)
        if t.kind == "ident":
            if self.peek().text in ("=", "+=", "-=", "*=", "/=", "[", "++", "--"):
                target = self._target()
                if self.tok.text in ("++", "--") and self.tok.kind == "op":
                    op = self.tok.text
                    self.i += 1
                    self.expect(";")
                    return Assign(target, "+=" if op == "++" else "-=", Num(1), p)
                op = self.tok.text
                if op not in ("=", "+=", "-=", "*=", "/="):
                    self.error(f"expected assignment operator, found {op!r}")
                self.i += 1
                e = self.expr()
                self.expect(";")
                return Assign(target, op, e, p)
        e = self.expr()
        self.expect(";")
        return ExprStmt(e, p)

    def _decl(self, type_, p) -> Decl:
        if self.tok.kind != "ident":
            self.error("expected variable name")
        name = self.tok.text
        self.i += 1
        self.expect("=")
        e = self.expr()
        self.expect(";")
        return Decl(type_, name, e, p)

    def _target(self):
        t = self.tok
        if t.kind != "ident":
            self.error("expected assignment target")
        self.i += 1
        if self.accept("["):
            idx = self.expr()
            self.expect("]")
            return Index(t.text, idx, self.pos(t))
        return Name(t.text, self.pos(t))

    # -- expressions ---------------------------------------------------------
    def expr(self):
        return self._ternary()

    def _ternary(self):
        p = self.pos()
        cond = self._binary(0)
        if self.accept("?"):
            a = self._ternary()
            self.expect(":")
            b = self._ternary()
            return Ternary(cond, a, b, p)
        return cond

    _LEVELS = (("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="), ("+", "-"), ("*", "/", "%"))

    def _binary(self, level: int):
        if level == len(self._LEVELS):
            return self._unary()
        left = self._binary(level + 1)
        ops = self._LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            t = self.tok
            self.i += 1
            right = self._binary(level + 1)
            left = Binary(t.text, left, right, self.pos(t))
        return left

    def _unary(self):
        t = self.tok
        if t.kind == "op" and t.text in ("-", "!", "+"):
            self.i += 1
            operand = self._unary()
            if t.text == "+":
                return operand
            return Unary(t.text, operand, self.pos(t))
        if t.kind == "op" and t.text == "(" and self.peek().kind == "ident" \
                and self.peek().text in TYPE_WORDS and self.peek(2).text == ")":
            type_ = TYPE_WORDS[self.peek().text]
            if type_ is None or type_ == "void":
                self.error("invalid cast", code="type")
            self.i += 3
            return Cast(type_, self._unary(), self.pos(t))
        return self._primary()

    def _primary(self):
        t = self.tok
        p = self.pos()
        if t.kind == "int":
            self.i += 1
            return Num(int(t.text), p)
        if t.kind == "real":
            self.i += 1
            return Num(float(t.text), p)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.i += 1
            return BoolLit(t.text == "true", p)
        if t.kind == "op" and t.text == "(":
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.i += 1
            if self.accept("("):
                args = []
                while not self.at(")"):
                    args.append(self.expr())
                    if not self.accept(","):
                        break
                self.expect(")")
                if t.text in TYPE_WORDS and TYPE_WORDS[t.text] in ("int", "real", "bool"):
                    if len(args) != 1:
                        self.error("cast takes one argument", t, code="arity")
                    return Cast(TYPE_WORDS[t.text], args[0], p)
                return Call(t.text, tuple(args), p)
            if self.accept("["):
                idx = self.expr()
                self.expect("]")
                return Index(t.text, idx, p)
            return Name(t.text, p)
        found = t.text or "end of input"
        self.error(f"expected an expression, found {found!r}")


def parse(source: str, slot: str) -> Program:
    """Parse ``source`` as the body (or full definition) of the hook ``slot``.

    Raises :class:`DslError` with line/column diagnostics on failure.
    """
    slot = SLOT_ALIASES.get(slot, slot)
    if slot not in SLOTS:
        raise ValueError(f"unknown hook slot {slot!r}")
    prog = Parser(source, slot).program()
    return Program(prog.slot, prog.params, prog.body, source)


_MARKER_RE = r"//\s*{which}\s+{name}\b[^\n]*\n?"


def extract_marked(text: str, slot: str) -> str | None:
    """Text strictly between ``// start <slot>`` and ``// end <slot>``, or None."""
    names = [slot] + [alias for alias, target in SLOT_ALIASES.items() if target == slot]
    for name in names:
        start = re.search(_MARKER_RE.format(which="start", name=re.escape(name)), text)
        if not start:
            continue
        end = re.search(r"//\s*end\s+" + re.escape(name) + r"\b", text[start.end():])
        if end:
            return text[start.end():start.end() + end.start()]
    return None


def wrap_marked(source: str, slot: str) -> str:
    body = source if source.endswith("\n") else source + "\n"
    return f"// start {slot}\n{body}// end {slot}\n"
