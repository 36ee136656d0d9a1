"""Random well-typed heuristic programs, renderable in several equivalent spellings."""
from __future__ import annotations

import random

from modsat.hooks.view import FIELDS, SLOT_KIND, SLOT_PARAMS

INT_FIELDS = sorted(n for n, f in FIELDS.items() if f.type == "int")
REAL_FIELDS = sorted(n for n, f in FIELDS.items() if f.type == "real")
COMMUTATIVE = {"+", "*", "==", "!="}


def writable(slot: str) -> list[str]:
    kind = SLOT_KIND[slot]
    return sorted(n for n, f in FIELDS.items() if kind in f.writable_in)


class ProgramGen:
    """Builds a small tree; ``render`` turns it into source under a spelling style."""

    def __init__(self, rng: random.Random, slot: str, max_depth: int = 3):
        self.rng = rng
        self.slot = slot
        self.max_depth = max_depth
        self.locals: list[tuple[str, str]] = []  # (name, type)
        self.counter = 0

    # -- expressions ------------------------------------------------------
    def num(self, depth: int):
        rng = self.rng
        leaves = ["int", "real", "ifield", "rfield"]
        if self.locals:
            leaves.append("local")
        if SLOT_PARAMS[self.slot]:
            leaves.append("param")
        if depth >= self.max_depth or rng.random() < 0.35:
            kind = rng.choice(leaves)
            if kind == "int":
                return ("lit", rng.randint(0, 100))
            if kind == "real":
                return ("lit", rng.choice([0.5, 0.8, 1.5, 2.0, 0.01]))
            if kind == "ifield":
                return ("name", rng.choice(INT_FIELDS))
            if kind == "rfield":
                return ("name", rng.choice(REAL_FIELDS))
            if kind == "param":
                return ("name", rng.choice(SLOT_PARAMS[self.slot])[0])
            return ("local", rng.choice(self.locals)[0])
        r = rng.random()
        if r < 0.6:
            op = rng.choice(["+", "-", "*", "+", "*"])
            return ("bin", op, self.num(depth + 1), self.num(depth + 1))
        if r < 0.75:
            return ("bin", "/", self.num(depth + 1), ("bin", "+", ("name", rng.choice(INT_FIELDS)), ("lit", 1)))
        if r < 0.9:
            return ("call", rng.choice(["min", "max"]), self.num(depth + 1), self.num(depth + 1))
        return ("call", "progress_estimate")

    def boolean(self, depth: int):
        rng = self.rng
        r = rng.random()
        if depth >= self.max_depth or r < 0.6:
            op = rng.choice(["<", "<=", ">", ">=", "==", "!="])
            return ("bin", op, self.num(depth + 1), self.num(depth + 1))
        if r < 0.8:
            return ("bin", rng.choice(["&&", "||"]), self.boolean(depth + 1), self.boolean(depth + 1))
        if r < 0.9:
            return ("not", self.boolean(depth + 1))
        return ("lit", rng.choice([True, False]))

    # -- statements -------------------------------------------------------
    def stmts(self, depth: int, n: int) -> list:
        out = []
        for _ in range(n):
            r = self.rng.random()
            targets = writable(self.slot)
            if r < 0.35:
                type_ = self.rng.choice(["int", "double"])
                name = f"t{self.counter}"
                self.counter += 1
                out.append(("decl", type_, name, self.num(1)))
                self.locals.append((name, type_))
            elif r < 0.6 and depth < 2:
                saved = list(self.locals)
                then = self.stmts(depth + 1, self.rng.randint(1, 2))
                self.locals = list(saved)
                other = self.stmts(depth + 1, self.rng.randint(0, 2)) if self.rng.random() < 0.5 else None
                self.locals = saved
                out.append(("if", self.boolean(1), then, other))
            elif targets:
                out.append(("assign", self.rng.choice(targets), self.rng.choice(["=", "+=", "*="]),
                            self.num(1)))
        return out

    def program(self):
        body = self.stmts(0, self.rng.randint(1, 4))
        if SLOT_KIND[self.slot] == "condition":
            body.append(("return", self.boolean(0)))
        return body


class Style:
    """How to spell a tree: local renaming, operand order, parentheses, comments."""

    def __init__(self, rng: random.Random | None = None):
        self.rng = rng
        self.names: dict[str, str] = {}

    def local(self, name: str) -> str:
        if self.rng is None:
            return name
        if name not in self.names:
            self.names[name] = f"{self.rng.choice(['x', 'tmp', 'val', 'k'])}_{len(self.names)}"
        return self.names[name]

    def flip(self) -> bool:
        return self.rng is not None and self.rng.random() < 0.5

    def comment(self) -> str:
        if self.rng is not None and self.rng.random() < 0.3:
            return "  // " + self.rng.choice(["tweak", "heuristic note", "see above"])
        return ""


def _fmt_lit(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def render_expr(e, style: Style) -> str:
    tag = e[0]
    if tag == "lit":
        return _fmt_lit(e[1])
    if tag == "name":
        return e[1]
    if tag == "local":
        return style.local(e[1])
    if tag == "not":
        return f"!({render_expr(e[1], style)})"
    if tag == "call":
        args = ", ".join(render_expr(a, style) for a in e[2:])
        return f"{e[1]}({args})"
    op, a, b = e[1], e[2], e[3]
    if op in COMMUTATIVE and style.flip():
        a, b = b, a
    text = f"({render_expr(a, style)} {op} {render_expr(b, style)})"
    if style.rng is not None and style.rng.random() < 0.2:
        text = f"({text})"
    return text


def render_stmts(stmts, style: Style, indent: int) -> list[str]:
    pad = "    " * indent
    lines = []
    for s in stmts:
        tag = s[0]
        if tag == "decl":
            lines.append(f"{pad}{s[1]} {style.local(s[2])} = {render_expr(s[3], style)};{style.comment()}")
        elif tag == "assign":
            lines.append(f"{pad}{s[1]} {s[2]} {render_expr(s[3], style)};{style.comment()}")
        elif tag == "return":
            lines.append(f"{pad}return {render_expr(s[1], style)};")
        elif tag == "if":
            lines.append(f"{pad}if ({render_expr(s[1], style)}) {{")
            lines += render_stmts(s[2], style, indent + 1)
            if s[3] is not None:
                lines.append(f"{pad}}} else {{")
                lines += render_stmts(s[3], style, indent + 1)
            lines.append(f"{pad}}}")
    return lines


def render(slot: str, tree, style: Style | None = None) -> str:
    style = style or Style()
    params = ", ".join(f"{'int' if t == 'int' else 'double'} {n}" for n, t in SLOT_PARAMS[slot])
    ret = "bool" if SLOT_KIND[slot] == "condition" else "void"
    lines = [f"{ret} {slot}({params}) {{"] + render_stmts(tree, style, 1) + ["}"]
    return "\n".join(lines) + "\n"


def random_program(rng: random.Random, slot: str | None = None):
    """(slot, tree, canonical-spelling source)."""
    from modsat.hooks.view import SLOTS

    slot = slot or rng.choice(SLOTS)
    tree = ProgramGen(rng, slot).program()
    return slot, tree, render(slot, tree)


def respell(rng: random.Random, slot: str, tree) -> str:
    """A different spelling of the same program."""
    return render(slot, tree, Style(rng))
