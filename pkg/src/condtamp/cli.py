"""condtamp command line: plan, run, bench, render.

Exit codes: 0 ok, 1 bad input, 2 planning or execution failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from .engine import Failure, Incumbent
from .executor import execute
from .ff import tp
from .pddl import PDDLError, ground
from .render import overlay_from_jsonl, render_svg
from .scenario import ScenarioError, load_scenario
from .world import world_from_dict

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2
BENCH_COLUMNS = ["scenario", "seed", "c_star", "wall_time_s", "point_checks", "segment_checks", "replans"]


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    p = out / name
    p.write_text(text, encoding="utf-8")
    return p


def cmd_plan(args) -> int:
    sc = load_scenario(args.scenario)
    out = Path(args.out)
    if args.task_only:
        task = ground(sc.domain, sc.problem)
        res = tp(task.init, task.goal_pos, task.goal_neg, task)
        if not hasattr(res, "actions"):
            print("Failure: UnsolvableTask")
            return EXIT_FAIL
        for a in res.actions:
            print(a.name)
        return EXIT_OK
    eng = sc.engine(seed=args.seed, eager=args.eager)
    res = eng.tmp()
    _write(out, "engine_trace.jsonl", eng.trace_jsonl())
    if eng.graph is not None:
        _write(out, "graph.jsonl", eng.graph.to_jsonl(eng.task))
    if isinstance(res, Failure):
        _write(out, "incumbent.jsonl", json.dumps({"v": 1, "type": "failure", "reason": res.reason}) + "\n")
        print(f"Failure: {res.reason}")
        return EXIT_FAIL
    _write(out, "incumbent.jsonl", res.to_jsonl())
    print(f"c* = {res.c_star:.3f}")
    for a in res.actions:
        print(f"  {a}")
    return EXIT_OK


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    out = Path(args.out)
    eng = sc.engine(seed=args.seed, eager=args.eager)
    res = eng.tmp()
    if isinstance(res, Failure) and res.reason == "UnsolvableTask":
        _write(out, "engine_trace.jsonl", eng.trace_jsonl())
        print(f"Failure: {res.reason}")
        return EXIT_FAIL
    tr = execute(eng, sc.timeline, sc.exec_cfg, condition=sc.condition)
    _write(out, "execution_trace.jsonl", tr.to_jsonl())
    _write(out, "engine_trace.jsonl", eng.trace_jsonl())
    if tr.outcome != "Success":
        print(f"Failure: {tr.reason} after {tr.replans} replans")
        return EXIT_FAIL
    print(f"Success: effort {tr.effort_s:.3f} s, {tr.replans} replans")
    return EXIT_OK


def bench_one(scenario: str, seed: int, eager: bool) -> dict:
    sc = load_scenario(scenario)
    t0 = time.perf_counter()
    eng = sc.engine(seed=seed, eager=eager)
    res = eng.tmp()
    checks = eng.counter.snapshot()
    replans = 0
    if isinstance(res, Incumbent) and len(sc.timeline.events):
        replans = execute(eng, sc.timeline, sc.exec_cfg, condition=sc.condition).replans
    wall = time.perf_counter() - t0
    return {"scenario": sc.name, "seed": seed,
            "c_star": f"{res.c_star:.6f}" if isinstance(res, Incumbent) else "inf",
            "wall_time_s": f"{wall:.4f}", "point_checks": checks["point_checks"],
            "segment_checks": checks["segment_checks"], "replans": replans}


def bench_csv(scenarios: list[str], seeds: list[int], eager: bool = False, jobs: int = 1) -> str:
    for s in scenarios:
        load_scenario(s)  # fail fast on bad input
    work = [(s, seed, eager) for s in scenarios for seed in seeds]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(bench_one, *zip(*work)))
    else:
        rows = [bench_one(*w) for w in work]
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    wr.writeheader()
    wr.writerows(rows)
    return buf.getvalue()


def cmd_bench(args) -> int:
    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    else:
        base = 0 if args.seed is None else args.seed
        seeds = list(range(base, base + args.repetitions))
    text = bench_csv(args.scenario or [], seeds, eager=args.eager, jobs=args.jobs)
    p = _write(Path(args.out), args.csv, text)
    print(f"wrote {p} ({text.count(chr(10)) - 1} rows)")
    return EXIT_OK


def cmd_render(args) -> int:
    show_robot = True
    if args.world:
        doc = json.loads(Path(args.world).read_text(encoding="utf-8"))
        w = world_from_dict(doc)
        show_robot = "robot" in doc
    elif args.scenario:
        w = load_scenario(args.scenario).world
    else:
        raise ScenarioError("render needs --scenario or --world")
    paths, extra = [], []
    if args.trace:
        paths, extra = overlay_from_jsonl(Path(args.trace).read_text(encoding="utf-8"))
    p = _write(Path(args.out), args.svg, render_svg(w, paths, extra_movables=extra, show_robot=show_robot))
    print(f"wrote {p}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage mistakes are input errors, not planning failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="condtamp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(p, multi=False):
        if multi:
            p.add_argument("--scenario", action="append", help="scenario file, directory or bundled name (repeatable)")
        else:
            p.add_argument("--scenario", required=p.prog.split()[-1] != "render",
                           help="scenario file, directory or bundled name")
        p.add_argument("--seed", type=int, default=None, help="overrides the scenario seed")
        p.add_argument("--eager", action="store_true", help="validate every candidate motion eagerly")
        p.add_argument("--out", default="out", help="output directory (default: out)")

    p = sub.add_parser("plan", help="compute an incumbent plan")
    common(p)
    p.add_argument("--task-only", action="store_true", help="symbolic plan only, no motion")
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("run", help="plan, then execute against the scenario timeline")
    common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("bench", help="CSV of effort and collision-check counts")
    common(p, multi=True)
    p.add_argument("--repetitions", type=int, default=1, help="seeds per scenario, counting up from --seed")
    p.add_argument("--seeds", default=None, help="explicit comma-separated seeds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", default="bench.csv")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("render", help="SVG of a world with optional trace overlay")
    common(p)
    p.add_argument("--world", default=None, help="world JSON instead of a scenario")
    p.add_argument("--trace", default=None, help="JSONL with waypoints (incumbent or execution trace)")
    p.add_argument("--svg", default="render.svg")
    p.set_defaults(fn=cmd_render)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ScenarioError, PDDLError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
