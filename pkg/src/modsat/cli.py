"""Command-line entry point: ``modsat <command> [options]``.

Every command accepts ``--seed``, ``--out`` and ``--config``. The config file
is JSON. Top-level keys apply to any command that has a matching option, and
a section named after the command (``{"evolve": {"budget": 20}}``) applies to
that command only. Explicit flags win over the file.

Exit codes: ``solve`` follows the competition convention (10 SAT, 20 UNSAT,
0 unknown). Every command returns 1 on a usage error and 2 on a runtime
failure; other commands return 0 on success.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

COMMANDS = ("solve", "gen", "bench", "tune", "presearch", "evolve", "discover", "prompt-opt",
            "report")
PATH_OPTIONS = ("dataset", "suite", "transcript", "cfg")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- parser ------------------------------------------------------------------

def _option(sp, defaults: dict, *flags, default=None, **kw):
    action = sp.add_argument(*flags, default=None, **kw)
    defaults[action.dest] = default
    return action


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modsat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    parser.defaults = {}

    def command(name, help_):
        sp = sub.add_parser(name, help=help_)
        d = {}
        parser.defaults[name] = d
        sp.add_argument("--config", help="JSON file with option values")
        _option(sp, d, "--seed", type=int, default=0)
        _option(sp, d, "--out", help="output path (stdout when omitted)")
        return sp, d

    def solver_opts(sp, d):
        _option(sp, d, "--suite", help="heuristic suite JSON (all-baseline when omitted)")
        _option(sp, d, "--cfg", help="solver config JSON")

    def dataset_opts(sp, d, clock="work"):
        _option(sp, d, "--dataset", help="dataset manifest.json")
        _option(sp, d, "--timeout", type=float, help="cutoff in seconds (manifest value by default)")
        _option(sp, d, "--jobs", type=int, default=1)
        _option(sp, d, "--clock", choices=("wall", "work"), default=clock)

    def llm_opts(sp, d):
        _option(sp, d, "--llm", choices=("live", "replay"), default="live")
        _option(sp, d, "--transcript", help="transcript to replay (--llm replay)")
        _option(sp, d, "--record", help="save the exchanges of a live run here")

    sp, d = command("solve", "solve one DIMACS file")
    sp.add_argument("instance")
    solver_opts(sp, d)
    _option(sp, d, "--timeout", type=float)
    _option(sp, d, "--strict", action="store_true", default=False,
            help="reject header/clause-count mismatches")
    _option(sp, d, "--no-model", action="store_true", default=False)

    sp, d = command("gen", "generate a seeded instance family")
    _option(sp, d, "--family", default="random-3sat")
    _option(sp, d, "--count", type=int, default=10)
    _option(sp, d, "--param", action="append", default=[], metavar="KEY=VALUE")
    _option(sp, d, "--timeout", type=float, default=10.0)
    _option(sp, d, "--name")
    _option(sp, d, "--candidates", help="comma-separated hook indices")
    _option(sp, d, "--training", help="take timeout and candidates from a training profile")

    sp, d = command("bench", "run a suite over a dataset and report PAR-2")
    solver_opts(sp, d)
    dataset_opts(sp, d, clock="wall")

    sp, d = command("tune", "random search over solver parameters")
    solver_opts(sp, d)
    dataset_opts(sp, d)
    _option(sp, d, "--budget", type=int, default=20)

    sp, d = command("presearch", "rank hooks by the cost of reverting each to baseline")
    solver_opts(sp, d)
    dataset_opts(sp, d)
    _option(sp, d, "--top", type=int, default=4)

    sp, d = command("evolve", "(1+lambda) evolutionary search over retained hooks")
    solver_opts(sp, d)
    dataset_opts(sp, d)
    _option(sp, d, "--budget", type=int, default=50)
    _option(sp, d, "--lambda", dest="lam", type=int, default=1)
    _option(sp, d, "--retained", help="comma-separated hook indices (manifest candidates by default)")
    _option(sp, d, "--generator", choices=("presets", "llm"), default="presets")
    _option(sp, d, "--template", default="updated")
    llm_opts(sp, d)

    sp, d = command("discover", "LLM-driven generate/validate/repair/evaluate loop")
    solver_opts(sp, d)
    dataset_opts(sp, d)
    _option(sp, d, "--max-iter", type=int, default=10)
    _option(sp, d, "--candidates", help="comma-separated hook indices (manifest by default)")
    _option(sp, d, "--template", default="updated")
    _option(sp, d, "--slot-policy", choices=("round-robin", "random"), default="round-robin")
    _option(sp, d, "--judge", action="store_true", default=False,
            help="ask the model when canonical forms differ")
    llm_opts(sp, d)

    sp, d = command("prompt-opt", "refine the prompt template for diversity")
    _option(sp, d, "--template", default="original")
    _option(sp, d, "--iterations", type=int, default=10)
    _option(sp, d, "--generations", type=int, default=20)
    _option(sp, d, "--threshold", type=float, default=0.5)
    llm_opts(sp, d)

    sp, d = command("report", "summarise run reports or search histories")
    sp.add_argument("inputs", nargs="+")
    _option(sp, d, "--plot", action="store_true", default=False,
            help="emit plot-ready TSV (cactus or PAR-2 per iteration)")
    _option(sp, d, "--timeout", type=float)
    return parser


def _merge(parser, args, cmd: str) -> argparse.Namespace:
    """Fill unset options from the config file, then from built-in defaults."""
    defaults = parser.defaults[cmd]
    config = {}
    if getattr(args, "config", None):
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(config, dict):
            raise UsageError("config file must hold a JSON object")
    values = {}
    for key, value in config.items():
        if key in COMMANDS:
            continue
        dest = key.replace("-", "_")
        if dest in defaults:
            values[dest] = value
    section = config.get(cmd, {})
    if not isinstance(section, dict):
        raise UsageError(f"config section {cmd!r} must be an object")
    for key, value in section.items():
        dest = {"lambda": "lam"}.get(key, key.replace("-", "_"))
        if dest not in defaults:
            raise UsageError(f"unknown option {key!r} in config section {cmd!r}")
        values[dest] = value
    for dest, default in defaults.items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, values.get(dest, default))
    for dest in PATH_OPTIONS:
        path = getattr(args, dest, None)
        if path and not Path(path).exists():
            raise UsageError(f"--{dest}: no such file {path}")
    return args


# -- helpers -----------------------------------------------------------------

def _indices(text, what: str) -> tuple:
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [x for x in str(text).split(",") if x.strip()]
    try:
        out = tuple(int(x) for x in items)
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated integers") from None
    if not out or any(not 1 <= i <= 7 for i in out):
        raise UsageError(f"{what}: indices must lie in 1..7")
    return out


def _suite(args):
    from .hooks import HeuristicSuite

    if not args.suite:
        return HeuristicSuite.baseline()
    try:
        return HeuristicSuite.loads(Path(args.suite).read_text())
    except (ValueError, KeyError) as exc:
        raise UsageError(f"--suite: {exc}") from None


def _cfg(args):
    from .solver import SolverConfig

    if getattr(args, "cfg", None):
        try:
            base = json.loads(Path(args.cfg).read_text())
            return SolverConfig(**{**base, "seed": args.seed})
        except (ValueError, TypeError) as exc:
            raise UsageError(f"--cfg: {exc}") from None
    return SolverConfig(seed=args.seed)


def _dataset(args):
    from .evaluation import DatasetManifest

    if not args.dataset:
        raise UsageError("--dataset is required")
    try:
        manifest = DatasetManifest.load(args.dataset)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"--dataset: {exc}") from None
    timeout = args.timeout if args.timeout is not None else manifest.timeout
    if timeout <= 0:
        raise UsageError("--timeout must be positive")
    return manifest, manifest.load_instances(), timeout


def _client(args):
    from .llm import LiveClient, RecordingClient, ReplayClient, Transcript

    if args.llm == "replay":
        if not args.transcript:
            raise UsageError("--llm replay needs --transcript")
        return ReplayClient(Transcript.load(args.transcript))
    client = LiveClient()
    return RecordingClient(client) if args.record else client


def _save_transcript(args, client) -> None:
    if args.llm == "live" and args.record:
        client.transcript.save(args.record)


def _template(name: str):
    from .prompts import PromptTemplate, load_template

    if name in ("original", "updated"):
        return load_template(name)
    try:
        return PromptTemplate.loads(Path(name).read_text())
    except OSError as exc:
        raise UsageError(f"--template: {exc}") from None


def _emit(args, text: str) -> None:
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _evaluator(args, timeout):
    from .search import DatasetEvaluator

    return DatasetEvaluator(timeout, _cfg(args), clock=args.clock, jobs=args.jobs)


# -- commands ----------------------------------------------------------------

def cmd_solve(args) -> int:
    from .cnf import DimacsError, parse_dimacs
    from .solver import solve

    try:
        text = Path(args.instance).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.instance}: {exc}") from None
    try:
        f = parse_dimacs(text, strict=args.strict)
    except DimacsError as exc:
        print(f"c parse error: {exc}", file=sys.stderr)
        return 2
    for w in f.warnings:
        print(f"c warning: {w}")
    cfg = replace(_cfg(args), timeout=args.timeout)
    result = solve(f, _suite(args), cfg)
    out = result.competition_output()
    if args.no_model:
        out = "".join(line + "\n" for line in out.splitlines() if not line.startswith("v "))
    sys.stdout.write(out)
    if args.out:
        Path(args.out).write_text(_dump({"status": result.status, "stats": result.stats,
                                         "model": result.model}))
    return result.exit_code


def cmd_gen(args) -> int:
    from .evaluation import FAMILIES, TRAINING_CONFIGS, generate_instances

    if args.family not in FAMILIES:
        raise UsageError(f"--family must be one of {', '.join(FAMILIES)}")
    if not args.out:
        raise UsageError("gen needs --out DIR")
    params = {}
    for item in args.param or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param {item!r}: expected KEY=VALUE")
        try:
            params[key] = json.loads(value)
        except ValueError:
            params[key] = value
    timeout, candidates = args.timeout, _indices(args.candidates, "--candidates")
    if args.training:
        if args.training not in TRAINING_CONFIGS:
            raise UsageError(f"unknown training profile {args.training!r}")
        timeout, candidates = TRAINING_CONFIGS[args.training]
    manifest = generate_instances(args.family, params, args.seed, args.out, count=args.count,
                                  timeout=timeout, name=args.name,
                                  candidates=candidates or (1, 2, 3, 4, 5, 6, 7))
    print(f"wrote {len(manifest.instances)} instances to {Path(args.out) / 'manifest.json'}")
    return 0


def run_dataset(*a, **kw):
    from .evaluation import run_dataset as run

    return run(*a, **kw)


def cmd_bench(args) -> int:
    from .evaluation import par2, summary, write_report

    manifest, instances, timeout = _dataset(args)
    records = run_dataset(instances, _suite(args), _cfg(args), timeout, jobs=args.jobs,
                          clock=args.clock)
    report = par2(records, timeout)
    if args.out:
        write_report(args.out, records, timeout, dataset=manifest.name)
    else:
        sys.stdout.write(_dump(summary(records, timeout, dataset=manifest.name)))
    print(f"PAR-2 {report.par2:.6g}  solved {report.solved}/{len(records)}", file=sys.stderr)
    return 0


def cmd_tune(args) -> int:
    from .evaluation import par2_objective, tune_random

    _, instances, timeout = _dataset(args)
    objective = par2_objective(instances, _suite(args), timeout, jobs=args.jobs, clock=args.clock)
    history = []
    best = tune_random(objective, args.budget, seed=args.seed, base=_cfg(args), history=history)
    score = min(s for _, s in history)
    _emit(args, _dump({"best": best.to_json(), "par2": score,
                       "history": [{"config": c.to_json(), "par2": s} for c, s in history]}))
    return 0


def cmd_presearch(args) -> int:
    from .hooks import HeuristicSuite
    from .search import presearch

    _, instances, timeout = _dataset(args)
    full = HeuristicSuite.loads(Path(args.suite).read_text()) if args.suite \
        else HeuristicSuite.discovered()
    scores = {}
    retained = presearch(instances, _evaluator(args, timeout), full, seed=args.seed,
                         top=args.top, scores=scores)
    _emit(args, _dump({"retained": list(retained), "timeout": timeout,
                       "ablation_par2": {str(k): v for k, v in sorted(scores.items())}}))
    return 0


def cmd_evolve(args) -> int:
    from .hooks import HeuristicSuite
    from .search import LLMGenerator, evolve, preset_generator

    manifest, instances, timeout = _dataset(args)
    retained = _indices(args.retained, "--retained") or manifest.candidates
    full = HeuristicSuite.loads(Path(args.suite).read_text()) if args.suite \
        else HeuristicSuite.discovered()
    client = None
    if args.generator == "llm":
        client = _client(args)
        generator = LLMGenerator(client, _template(args.template))
    else:
        generator = preset_generator()
    try:
        state = evolve(instances, retained, generator, _evaluator(args, timeout), full,
                       lam=args.lam, budget=args.budget, seed=args.seed)
    finally:
        if client is not None:
            _save_transcript(args, client)
    _emit(args, _dump({"command": "evolve", "timeout": timeout, **state.to_json()}))
    return 0


def cmd_discover(args) -> int:
    from .search import discover

    manifest, instances, timeout = _dataset(args)
    candidates = _indices(args.candidates, "--candidates") or manifest.candidates
    client = _client(args)
    try:
        state = discover(instances, candidates, client, _evaluator(args, timeout), _suite(args),
                         evaluator=client if args.judge else None, repairer=client,
                         max_iter=args.max_iter, template=_template(args.template),
                         seed=args.seed, slot_policy=args.slot_policy)
    finally:
        _save_transcript(args, client)
    _emit(args, _dump({"command": "discover", "timeout": timeout, **state.to_json()}))
    return 0


def cmd_prompt_opt(args) -> int:
    from .prompts import optimize_prompt

    client = _client(args)
    trace = []
    try:
        best = optimize_prompt(_template(args.template), client, i=args.iterations,
                               j=args.generations, success_threshold=args.threshold,
                               seed=args.seed, trace=trace)
    finally:
        _save_transcript(args, client)
    _emit(args, best.dumps())
    for row in trace:
        print(json.dumps(row, sort_keys=True), file=sys.stderr)
    return 0


def _report_one(path: Path, args):
    from .evaluation import read_records

    if path.suffix == ".jsonl":
        records = read_records(path)
        timeout = args.timeout
        side = path.with_suffix(".summary.json")
        if timeout is None and side.exists():
            timeout = json.loads(side.read_text())["timeout"]
        if timeout is None:
            raise UsageError(f"{path}: pass --timeout (no summary file next to it)")
        return "runs", records, timeout
    doc = json.loads(path.read_text())
    if "history" not in doc:
        raise UsageError(f"{path}: neither a run report nor a search history")
    return "search", doc, None


def cmd_report(args) -> int:
    from .evaluation import cactus_table, summary

    loaded = []
    for name in args.inputs:
        path = Path(name)
        if not path.exists():
            raise UsageError(f"no such file {name}")
        loaded.append((path,) + _report_one(path, args))
    kinds = {k for _, k, _, _ in loaded}
    if len(kinds) > 1:
        raise UsageError("cannot mix run reports and search histories")
    if kinds == {"runs"}:
        if args.plot:
            timeout = loaded[0][3] if len({t for *_, t in loaded}) == 1 else None
            text = cactus_table({p.stem: recs for p, _, recs, _ in loaded}, timeout)
        else:
            text = _dump({p.stem: summary(recs, t) for p, _, recs, t in loaded})
    else:
        if args.plot:
            rows = ["series\tstep\tpar2\tbest\taccepted"]
            for p, _, doc, _ in loaded:
                for i, h in enumerate(doc["history"]):
                    par2 = "" if h.get("par2") is None else repr(h["par2"])
                    rows.append(f"{p.stem}\t{i}\t{par2}\t{h['best']!r}\t{int(bool(h.get('accepted')))}")
            text = "\n".join(rows) + "\n"
        else:
            text = _dump({p.stem: {"best": doc["best"], "incumbent": doc["incumbent"],
                                   "attempts": len(doc["history"]) - 1,
                                   "accepted": sum(1 for h in doc["history"][1:] if h.get("accepted"))}
                          for p, _, doc, _ in loaded})
    _emit(args, text)
    return 0


HANDLERS = {
    "solve": cmd_solve, "gen": cmd_gen, "bench": cmd_bench, "tune": cmd_tune,
    "presearch": cmd_presearch, "evolve": cmd_evolve, "discover": cmd_discover,
    "prompt-opt": cmd_prompt_opt, "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("modsat: a command is required (" + ", ".join(COMMANDS) + ")")
        _merge(parser, args, args.command)
        return HANDLERS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0
    except KeyboardInterrupt:
        return 2
    except Exception as exc:
        print(f"modsat: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
