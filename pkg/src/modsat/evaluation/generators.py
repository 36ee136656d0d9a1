"""Desk-scale instance families and dataset manifests."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from ..cnf import Formula, write_dimacs

FAMILIES = ("random-3sat", "pigeonhole", "parity-chain")

# Training timeout (s) and candidate hook indices per benchmark family, as
# configured for the original large-scale study. Indices follow SLOTS order.
TRAINING_CONFIGS = {
    "cryptography-ascon": (800, (1, 2, 3, 6)),
    "register-allocation": (5000, (2, 3, 5, 6)),
    "social-golfer": (2000, (1, 4, 5, 6)),
    "hashtable-safety": (500, (2, 4, 5, 7)),
    "argumentation-2023": (2000, (1, 2, 3, 6)),
    "argumentation-2024": (2000, (1, 2, 3, 5)),
    "hamiltonian": (800, (3, 4, 5, 6)),
    "minesweeper": (500, (2, 4, 3, 7)),
    "knight-tour": (2000, (1, 3, 4, 7)),
    "zamkeller": (2000, (1, 3, 4, 6)),
    "eda": (800, (2, 5, 6, 7)),
}


@dataclass
class DatasetManifest:
    name: str
    instances: list  # paths relative to the manifest directory
    timeout: float
    candidates: tuple = (1, 2, 3, 4, 5, 6, 7)
    family: str = ""
    params: dict = field(default_factory=dict)
    seed: int = 0
    root: Path | None = None

    def __post_init__(self):
        self.candidates = tuple(int(i) for i in self.candidates)
        if len(set(self.candidates)) != len(self.candidates):
            raise ValueError("candidate indices must be distinct")
        if any(not 1 <= i <= 7 for i in self.candidates):
            raise ValueError("candidate indices must lie in 1..7")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    def to_json(self) -> dict:
        return {"name": self.name, "instances": list(self.instances), "timeout": self.timeout,
                "candidates": list(self.candidates), "family": self.family,
                "params": self.params, "seed": self.seed}

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")
        self.root = path.parent
        return path

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        path = Path(path)
        d = json.loads(path.read_text())
        m = cls(d["name"], d["instances"], d["timeout"], tuple(d.get("candidates", range(1, 8))),
                d.get("family", ""), d.get("params", {}), d.get("seed", 0))
        m.root = path.parent
        return m

    def paths(self) -> list[Path]:
        root = self.root or Path(".")
        return [root / p for p in self.instances]

    def load_instances(self) -> list[tuple[str, Formula]]:
        from .harness import load_formula

        return [(Path(p).stem, load_formula(full)) for p, full in zip(self.instances, self.paths())]


# -- families ----------------------------------------------------------------

def random_3sat(n: int, m: int | None = None, ratio: float = 4.26, seed: int = 0) -> Formula:
    if n < 3:
        raise ValueError("random-3sat needs n >= 3")
    if m is None:
        m = round(ratio * n)
    if m < 0:
        raise ValueError("clause count must be non-negative")
    rng = random.Random(seed)
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), 3)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return Formula.from_dimacs_clauses(n, clauses)


def pigeonhole(p: int, h: int) -> Formula:
    """p pigeons into h holes: each pigeon somewhere, no two in one hole."""
    if p < 1 or h < 1:
        raise ValueError("pigeonhole needs p >= 1 and h >= 1")

    def x(i, j):
        return i * h + j + 1

    clauses = [[x(i, j) for j in range(h)] for i in range(p)]
    for j in range(h):
        for a in range(p):
            for b in range(a + 1, p):
                clauses.append([-x(a, j), -x(b, j)])
    return Formula.from_dimacs_clauses(p * h, clauses)


def _xor_chain(order, parity, next_var, clauses):
    """Clauses forcing XOR of ``order`` to ``parity``; returns the next free var."""
    acc = order[0]
    for x in order[1:]:
        t = next_var
        next_var += 1
        # t <-> acc xor x
        clauses += [[-t, acc, x], [-t, -acc, -x], [t, -acc, x], [t, acc, -x]]
        acc = t
    clauses.append([acc] if parity else [-acc])
    return next_var


def parity_chain(width: int, seed: int = 0, satisfiable: bool | None = None) -> Formula:
    """Two XOR chains over the same ``width`` variables, in different orders.

    Equal parities give a satisfiable instance, opposite parities an
    unsatisfiable one. ``satisfiable=None`` picks at random.
    """
    if width < 2:
        raise ValueError("parity-chain needs width >= 2")
    rng = random.Random(seed)
    if satisfiable is None:
        satisfiable = rng.random() < 0.5
    b = rng.random() < 0.5
    xs = list(range(1, width + 1))
    shuffled = xs[:]
    rng.shuffle(shuffled)
    clauses: list = []
    nv = _xor_chain(xs, b, width + 1, clauses)
    nv = _xor_chain(shuffled, b if satisfiable else not b, nv, clauses)
    return Formula.from_dimacs_clauses(nv - 1, clauses)


def make_instance(family: str, params: dict, seed: int) -> Formula:
    if family == "random-3sat":
        return random_3sat(int(params.get("n", 50)), params.get("m"),
                           float(params.get("ratio", 4.26)), seed)
    if family == "pigeonhole":
        h = int(params.get("h", 4))
        return pigeonhole(int(params.get("p", h + 1)), h)
    if family == "parity-chain":
        return parity_chain(int(params.get("width", 10)), seed, params.get("satisfiable"))
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def instance_seed(seed: int, i: int) -> int:
    return seed * 1_000_003 + i


def generate_instances(family: str, params: dict, seed: int, out_dir: str | Path, *,
                       count: int = 1, timeout: float = 10.0, name: str | None = None,
                       candidates=(1, 2, 3, 4, 5, 6, 7)) -> DatasetManifest:
    """Write ``count`` instances plus ``manifest.json`` under ``out_dir``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for i in range(count):
        f = make_instance(family, params, instance_seed(seed, i))
        fname = f"{family}-{i:04d}.cnf"
        (out / fname).write_text(write_dimacs(f))
        files.append(fname)
    manifest = DatasetManifest(name or family, files, timeout, tuple(candidates), family,
                               dict(params), seed)
    manifest.save(out / "manifest.json")
    return manifest
