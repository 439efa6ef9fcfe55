"""Scenario files: one JSON document tying domain, problem, world and timeline.

Paths inside a scenario are relative to the scenario file. Example::

    {"domain": "../domain.pddl", "problem": "problem.pddl", "world": "world.json",
     "timeline": "timeline.json", "seed": 0,
     "engine": {"max_attempts": 5}, "planner": {"max_iters": 20000},
     "executor": {"max_attempts": 3},
     "contingencies": {"holding": {"add": [["holding", "g", "cup"]], "delete": [...]}},
     "condition": "holding"}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

from .engine import Engine, EngineConfig
from .executor import EventTimeline, ExecConfig
from .pddl import DomainDef, ProblemDef, load_domain, load_problem
from .world import WorldState, load_world


class ScenarioError(Exception):
    pass


@dataclass
class Scenario:
    path: Path
    name: str
    domain: DomainDef
    problem: ProblemDef
    world: WorldState
    timeline: EventTimeline
    engine_cfg: EngineConfig
    exec_cfg: ExecConfig
    seed: int = 0
    contingencies: dict = field(default_factory=dict)
    condition: Optional[str] = None
    raw: dict = field(default_factory=dict, repr=False)

    def engine(self, *, seed: Optional[int] = None, eager: bool = False,
               overrides: Optional[dict] = None) -> Engine:
        cfg = self.engine_cfg
        planner = cfg.planner
        if eager:
            planner = replace(planner, lazy=False)
        s = self.seed if seed is None else seed
        cfg = replace(cfg, seed=s, planner=planner, **(overrides or {}))
        return Engine(self.domain, self.problem, self.world, cfg, contingencies=self.contingencies)


def builtin_dir() -> Path:
    return Path(str(resources.files("condtamp") / "scenarios"))


def resolve(name_or_path: str) -> Path:
    """A scenario file path, or the name of a bundled scenario."""
    p = Path(name_or_path)
    if p.is_dir():
        p = p / "scenario.json"
    if p.exists():
        return p
    b = builtin_dir() / name_or_path / "scenario.json"
    if b.exists():
        return b
    raise ScenarioError(f"no scenario at {name_or_path}")


def load_scenario(name_or_path: str) -> Scenario:
    path = resolve(name_or_path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    base = path.parent

    def need(key):
        if key not in doc:
            raise ScenarioError(f"{path}: missing '{key}'")
        f = base / doc[key]
        if not f.exists():
            raise ScenarioError(f"{path}: {key} file {f} does not exist")
        return f

    domain = load_domain(need("domain"))
    problem = load_problem(need("problem"), domain)
    world = load_world(need("world"))
    timeline = EventTimeline.load(need("timeline")) if doc.get("timeline") else EventTimeline()
    seed = int(doc.get("seed", 0))
    ecfg = EngineConfig.from_dict({**doc.get("engine", {}), "seed": seed}, doc.get("planner"))
    xcfg = ExecConfig(**doc.get("executor", {}))
    conts = doc.get("contingencies", {})
    cond = doc.get("condition")
    if cond is not None and cond not in conts:
        raise ScenarioError(f"{path}: condition {cond!r} is not a declared contingency")
    return Scenario(path=path, name=doc.get("name", base.name), domain=domain, problem=problem, world=world,
                    timeline=timeline, engine_cfg=ecfg, exec_cfg=xcfg, seed=seed,
                    contingencies=conts, condition=cond, raw=doc)
