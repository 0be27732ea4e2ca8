"""Command-line driver: ``viewcheck check | run | erase | trace``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from .checker import check_program
from .diagnostics import ParseError
from .erasure import erase_program, erased_text
from .parser import parse_program
from .runtime import FuelExhausted, Stuck, run

EXIT_OK, EXIT_TYPE, EXIT_IO, EXIT_STUCK, EXIT_FUEL = 0, 1, 2, 3, 4


def corpus_root() -> Path:
    """The bundled corpus, unless VIEWCHECK_CORPUS points elsewhere."""
    env = os.environ.get("VIEWCHECK_CORPUS")
    return Path(env) if env else Path(__file__).with_name("corpus")


def resolve_path(path: str) -> Path:
    """``corpus/NAME`` falls back to the corpus root when not found as given."""
    p = Path(path)
    if not p.exists() and p.parts and p.parts[0] == "corpus":
        alt = corpus_root().joinpath(*p.parts[1:])
        if alt.exists():
            return alt
    return p


class Loaded:
    """Outcome of reading, parsing and checking one file."""

    def __init__(self, path: str, code: int, diagnostics: list, checked=None,
                 judgments: Optional[list] = None):
        self.path = path
        self.code = code
        self.diagnostics = diagnostics
        self.checked = checked
        self.judgments = judgments or []


def load(path: str, trace_proofs: bool = False, explain: bool = False) -> Loaded:
    try:
        text = resolve_path(path).read_text()
    except OSError as e:
        return Loaded(path, EXIT_IO, [f"{path}:0:0: error: [io] {e.strerror or e}"])
    try:
        prog = parse_program(text, path)
    except ParseError as e:
        return Loaded(path, EXIT_IO, [e.diagnostic(path)])
    judgments: Optional[list] = [] if trace_proofs else None
    checked = check_program(prog, trace=judgments, explain=explain)
    lines = list(judgments or [])
    if explain:
        from .printer import pp_static
        for hyps, goal, ok in checked.queries:
            h = ", ".join(pp_static(x) for x in hyps) or "true"
            lines.append(f"query: {h} |- {pp_static(goal)} : {'valid' if ok else 'invalid'}")
    code = EXIT_OK if checked.ok else EXIT_TYPE
    return Loaded(path, code, list(checked.diagnostics), checked, lines)


def _render(diags, as_json: bool) -> list[str]:
    if as_json:
        return [json.dumps(d.to_json() if hasattr(d, "to_json") else {"message": d})
                for d in diags]
    return [d.render() if hasattr(d, "render") else d for d in diags]


def _check_one(args) -> tuple[int, list[str]]:
    path, as_json, trace_proofs, explain = args
    r = load(path, trace_proofs, explain)
    return r.code, r.judgments + _render(r.diagnostics, as_json)


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(paths: list[str], as_json: bool = False, trace_proofs: bool = False,
              explain: bool = False, jobs: int = 1, out=None) -> int:
    out = out or sys.stdout
    work = [(p, as_json, trace_proofs, explain) for p in paths]
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_check_one, work))
    else:
        results = [_check_one(w) for w in work]
    code = EXIT_OK
    for (c, lines), path in zip(results, paths):
        for line in lines:
            print(line, file=out)
        if c == EXIT_OK and not as_json:
            print(f"{path}: ok", file=out)
        code = max(code, c)
    return code


def _loaded_or_exit(path, as_json, out, **kw):
    r = load(path, **kw)
    for line in r.judgments + _render(r.diagnostics, as_json):
        print(line, file=out)
    return r


def cmd_run(path: str, fuel: int = 10 ** 6, instrumented: bool = False, check_every: int = 0,
            dump_store: bool = False, as_json: bool = False, trace: bool = False,
            out=None, **kw) -> int:
    out = out or sys.stdout
    r = _loaded_or_exit(path, as_json, out, **kw)
    if r.code != EXIT_OK:
        return r.code
    if r.checked.main is None:
        print("no main", file=out)
        return EXIT_OK
    instrumented = instrumented or check_every > 0
    lines: Optional[list] = [] if trace else None
    res = run(r.checked, instrumented=instrumented, fuel=fuel, check_every=check_every,
              trace=lines)
    for line in lines or ():
        print(line, file=out)
    o = res.outcome
    report = {"steps": res.steps, "store": res.store.dump()}
    if isinstance(o, Stuck):
        where = f"{o.span.line}:{o.span.col}" if o.span else "?"
        report.update(outcome="stuck", reason=o.reason, at=where)
        code = EXIT_STUCK
        text = f"stuck at {where} after {o.steps} steps: {o.reason}"
    elif isinstance(o, FuelExhausted):
        report.update(outcome="fuel exhausted")
        code = EXIT_FUEL
        text = f"fuel exhausted after {o.steps} steps"
    else:
        report.update(outcome="value", value=erased_text(o.term))
        code = EXIT_OK
        text = report["value"]
    if res.oracle_failures:
        report["oracle_failures"] = [f"step {k}: {m}" for k, m in res.oracle_failures]
    if as_json:
        print(json.dumps(report), file=out)
        return code
    print(text, file=out)
    for k, m in res.oracle_failures:
        print(f"oracle violation at step {k}: {m}", file=out)
    if dump_store:
        for line in report["store"]:
            print(line, file=out)
    return code


def cmd_erase(path: str, as_json: bool = False, out=None, **kw) -> int:
    out = out or sys.stdout
    r = _loaded_or_exit(path, as_json, out, **kw)
    if r.code != EXIT_OK:
        return r.code
    text = erase_program(r.checked)
    print(json.dumps({"erased": text}) if as_json else text, end="\n" if as_json else "",
          file=out)
    return EXIT_OK


def cmd_trace(path: str, **kw) -> int:
    return cmd_run(path, trace=True, **kw)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--explain-constraints", action="store_true",
                        help="print every entailment query and its verdict")
    common.add_argument("--trace-proofs", action="store_true",
                        help="print each discharged judgment")
    evaluation = argparse.ArgumentParser(add_help=False)
    evaluation.add_argument("--fuel", type=int, default=10 ** 6)
    evaluation.add_argument("--instrumented", action="store_true",
                            help="keep proofs at runtime instead of running the erased program")
    evaluation.add_argument("--check-every", type=int, default=0, metavar="K",
                            help="re-check subject reduction and store typing every K steps")
    evaluation.add_argument("--dump-store", action="store_true")

    p = argparse.ArgumentParser(prog="viewcheck", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)
    c = sub.add_parser("check", parents=[common], help="type-check files")
    c.add_argument("paths", nargs="+")
    c.add_argument("--jobs", type=int, default=1)
    r = sub.add_parser("run", parents=[common, evaluation], help="evaluate main")
    r.add_argument("path")
    e = sub.add_parser("erase", parents=[common], help="print the erased program")
    e.add_argument("path")
    t = sub.add_parser("trace", parents=[common, evaluation], help="print every reduction step")
    t.add_argument("path")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    a = build_parser().parse_args(argv)
    kw = dict(as_json=a.json, trace_proofs=a.trace_proofs, explain=a.explain_constraints)
    if a.cmd == "check":
        return cmd_check(a.paths, jobs=a.jobs, **kw)
    if a.cmd == "erase":
        return cmd_erase(a.path, **kw)
    ev = dict(fuel=a.fuel, instrumented=a.instrumented, check_every=a.check_every,
              dump_store=a.dump_store)
    if a.cmd == "run":
        return cmd_run(a.path, **ev, **kw)
    return cmd_trace(a.path, **ev, **kw)


if __name__ == "__main__":
    sys.exit(main())
