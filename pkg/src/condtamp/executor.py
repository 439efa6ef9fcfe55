"""Deterministic execution of an incumbent against a scripted event timeline.

Simulated time advances along the incumbent's waypoints. Events either
arrive at a simulated time or right after the n-th executed action. Branches
already present in the graph are dispatched without replanning; anything
else (a new obstacle on the remaining path, a failed action) triggers a
replan from the current node.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .engine import Engine, Incumbent
from .kpiece import validate
from .pddl import State, apply
from .world import Config, MotionPath, MovableObject, WorldState, movable_from_dict, movable_to_dict, wrap_angle

EVENT_KINDS = ("ObstacleAppears", "ActionFailure", "ObjectMoved")


class NoApplicableBranch(Exception):
    pass


@dataclass(frozen=True)
class Event:
    kind: str
    at: Optional[float] = None
    after_action: Optional[int] = None
    obj: Optional[MovableObject] = None
    action: Optional[int] = None
    oid: Optional[str] = None
    pose: Optional[Config] = None

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.at is not None:
            d["at"] = self.at
        if self.after_action is not None:
            d["after_action"] = self.after_action
        if self.obj is not None:
            d["object"] = movable_to_dict(self.obj)
        if self.action is not None:
            d["action"] = self.action
        if self.oid is not None:
            d["id"] = self.oid
        if self.pose is not None:
            d["pose"] = self.pose.to_list()
        return d


@dataclass
class EventTimeline:
    events: list[Event] = field(default_factory=list)

    def __post_init__(self):
        times = [e.at for e in self.events if e.at is not None]
        idx = [e.after_action for e in self.events if e.after_action is not None]
        if times != sorted(times) or idx != sorted(idx):
            raise ValueError("event triggers must be nondecreasing")
        seen = set()
        for e in self.events:
            if e.kind not in EVENT_KINDS:
                raise ValueError(f"unknown event kind {e.kind!r}")
            if e.kind == "ObstacleAppears":
                if e.obj is None or e.obj.id in seen:
                    raise ValueError("appearing objects need a fresh id")
                seen.add(e.obj.id)

    @classmethod
    def from_list(cls, items: list) -> "EventTimeline":
        evs = []
        for d in items:
            kind = d["kind"]
            evs.append(Event(
                kind=kind,
                at=None if "at" not in d else float(d["at"]),
                after_action=None if "after_action" not in d else int(d["after_action"]),
                obj=movable_from_dict(d["object"]) if "object" in d else None,
                action=None if "action" not in d else int(d["action"]),
                oid=d.get("id"),
                pose=Config.from_list(d["pose"]) if "pose" in d else None,
            ))
            if evs[-1].at is None and evs[-1].after_action is None and kind != "ActionFailure":
                raise ValueError("event needs an 'at' or 'after_action' trigger")
        return cls(evs)

    @classmethod
    def load(cls, path) -> "EventTimeline":
        with open(path, encoding="utf-8") as fh:
            return cls.from_list(json.load(fh))


@dataclass
class ExecConfig:
    max_attempts: int = 3


@dataclass
class ExecutionTrace:
    entries: list[dict] = field(default_factory=list)
    outcome: str = "Success"
    reason: str = ""
    replans: int = 0
    effort_s: float = 0.0
    segments: list[tuple[MotionPath, WorldState]] = field(default_factory=list, repr=False)
    gate_ok: Optional[bool] = None

    def log(self, kind: str, t: float, **data) -> None:
        rec = {"v": 1, "seq": len(self.entries), "t": round(t, 6), "kind": kind,
               "effort_s": round(self.effort_s, 6)}
        rec.update(data)
        self.entries.append(rec)

    def count(self, kind: str) -> int:
        return sum(1 for e in self.entries if e["kind"] == kind)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.entries)


# ---------------------------------------------------------------------------
# path slicing


def interpolate(path: MotionPath, t: float) -> Config:
    """Config at time ``t`` (same clock as the path's waypoints)."""
    wps = path.waypoints
    if t <= wps[0][0]:
        return wps[0][1]
    for (t0, a), (t1, b) in zip(wps, wps[1:]):
        if t <= t1:
            f = 0.0 if t1 - t0 <= 1e-12 else (t - t0) / (t1 - t0)
            return Config(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f,
                          a.theta + wrap_angle(b.theta - a.theta) * f)
    return wps[-1][1]


def split(path: MotionPath, t: float) -> tuple[MotionPath, MotionPath]:
    """Head (up to ``t``) and tail (from ``t``) of a timed path."""
    c = interpolate(path, t)
    head = [(tw, cw) for tw, cw in path.waypoints if tw < t] + [(t, c)]
    tail = [(t, c)] + [(tw, cw) for tw, cw in path.waypoints if tw > t]
    return MotionPath(path.action, head, path.validated), MotionPath(path.action, tail, path.validated)


# ---------------------------------------------------------------------------


def dispatch(engine: Engine, node: int, state: State, inc: Optional[Incumbent]) -> int:
    """Child to execute next from ``node`` given the runtime symbolic state.

    Prefers the incumbent's edge; otherwise the cheapest applicable child.
    """
    g = engine.graph
    kids = [c for c in g.children(node) if (node, c) not in engine.failed
            and g.edge(node, c).action.precon_pos <= state
            and not (g.edge(node, c).action.precon_neg & state)]
    if not kids:
        raise NoApplicableBranch(f"no applicable branch at node {node}")
    if len(kids) == 1:
        return kids[0]
    if inc is not None:
        for u, v in inc.edges:
            if u == node and v in kids:
                return v
    return min(kids, key=lambda c: (math.inf if g.edge(node, c).effort_s is None else g.edge(node, c).effort_s, c))


def _path_for(engine: Engine, inc: Optional[Incumbent], u: int, v: int) -> Optional[MotionPath]:
    if inc is not None:
        for e, p in zip(inc.edges, inc.paths):
            if e == (u, v):
                return p
    return engine._edge_motion(u, v)


def _blocked(engine: Engine, inc: Optional[Incumbent], node: int, child: Optional[int],
             tail: Optional[MotionPath]) -> bool:
    """Does anything left to execute now collide?"""
    if tail is not None and child is not None:
        if validate(MotionPath(tail.action, list(tail.waypoints)), engine.world_at(node),
                    engine.cfg.planner.sweep_step) is not None:
            return True
    if inc is None:
        return False
    started = child is None
    for (u, v), p in zip(inc.edges, inc.paths):
        if not started:
            started = (u, v) == (node, child)
            continue
        if validate(MotionPath(p.action, list(p.waypoints)), engine.world_at(u),
                    engine.cfg.planner.sweep_step) is not None:
            return True
    return False


def _remaining_from(inc: Optional[Incumbent], node: int) -> Optional[Incumbent]:
    """The part of ``inc`` that starts at ``node`` (None if it does not pass there)."""
    if inc is None or node not in inc.plan:
        return None
    k = inc.plan.index(node)
    return Incumbent(inc.plan[k:], inc.actions[k:], inc.paths[k:], sum(p.effort_s for p in inc.paths[k:]))


def execute(engine: Engine, tl: Optional[EventTimeline] = None, cfg: Optional[ExecConfig] = None, *,
            condition: Optional[str] = None) -> ExecutionTrace:
    """Run the engine's incumbent(s) in simulation, reacting to ``tl``."""
    tl = tl or EventTimeline()
    cfg = cfg or ExecConfig()
    tr = ExecutionTrace()
    g = engine.graph
    state = engine.contingencies[condition] if condition else engine.task.init
    node = g.node_of(state)
    t = 0.0
    executed = 0
    pending = list(tl.events)
    appeared: dict[str, Config] = {}

    def current_config() -> Config:
        return engine.world_at(node).config

    def replan(failed_edge=None) -> Optional[Incumbent]:
        while tr.replans < cfg.max_attempts:
            tr.replans += 1
            before = (len(g.nodes), len(g.edges))
            res = engine.replan(node, current_config(), failed_edge=failed_edge)
            failed_edge = None
            tr.log("replan", t, node=node, attempt=tr.replans,
                   spliced={"nodes": len(g.nodes) - before[0], "edges": len(g.edges) - before[1]},
                   result="ok" if isinstance(res, Incumbent) else res.reason,
                   c_star=round(res.c_star, 6) if isinstance(res, Incumbent) else None)
            if isinstance(res, Incumbent):
                return res
        return None

    def apply_event(e: Event) -> None:
        nonlocal state
        if e.kind == "ObstacleAppears":
            added = engine.perceive(e.obj)
            state = state | added
            appeared[e.obj.id] = e.obj.pose
        elif e.kind == "ObjectMoved":
            engine.move_object(e.oid, e.pose, state)
            appeared.pop(e.oid, None)

    if node is None:
        tr.outcome, tr.reason = "Failure", "UnknownInitialState"
        tr.log("failure", t, reason=tr.reason)
        return tr
    inc = engine.incumbents.get(node)
    if node != g.root():
        tr.log("branch_chosen", t, node=node, condition=condition, via="entry")
    tr.log("start", t, node=node, c_star=None if inc is None else round(inc.c_star, 6))
    if inc is None:
        inc = replan()
        if inc is None:
            return _fail(tr, t)

    while not engine.is_goal(state):
        try:
            child = dispatch(engine, node, state, inc)
        except NoApplicableBranch:
            inc = replan()
            if inc is None:
                return _fail(tr, t)
            continue
        if len(g.children(node)) > 1:
            tr.log("branch_chosen", t, node=node, child=child, action=g.edge(node, child).action.name)
        edge = g.edge(node, child)
        path = _path_for(engine, inc, node, child)
        if path is None:
            inc = replan()
            if inc is None:
                return _fail(tr, t)
            continue
        path = path.shifted(t - path.waypoints[0][0])
        dur = path.effort_s
        tr.log("action_started", t, index=executed, action=edge.action.name, node=node, child=child)

        failure = next((e for e in pending if e.kind == "ActionFailure" and e.action == executed), None)
        if failure is not None:
            pending.remove(failure)
            tr.log("event", t, event=failure.to_dict())
            stationary = path.configs[0].dist(path.configs[-1]) <= 1e-9
            if stationary:
                tr.segments.append((path, engine.world_at(node)))
                t += dur
                tr.effort_s += dur
            tr.log("action_failed", t, index=executed, action=edge.action.name,
                   waypoints=_wps(path) if stationary else [])
            executed += 1
            inc = replan(failed_edge=(node, child))
            if inc is None:
                return _fail(tr, t)
            continue

        t_end = t + dur
        halted = False
        due = [e for e in pending if e.at is not None and e.at <= t_end + 1e-12 and e.kind != "ActionFailure"]
        for e in due:
            pending.remove(e)
            te = max(e.at, t)
            w_before = engine.world_at(node)
            apply_event(e)
            tr.log("event", te, event=e.to_dict())
            head, tail = split(path, te)
            if _blocked(engine, inc, node, child, tail):
                tr.segments.append((head, w_before))
                tr.effort_s += te - t
                t = te
                c = interpolate(path, te)
                tr.log("halt", t, config=[round(v, 6) for v in c.to_list()], waypoints=_wps(head))
                engine.override = (node, c)
                inc = replan()
                if inc is None:
                    return _fail(tr, t)
                halted = True
                break
        if halted:
            continue

        tr.segments.append((path, engine.world_at(node)))
        t = t_end
        tr.effort_s += dur
        state = apply(state, edge.action)
        node = child
        tr.log("action_finished", t, index=executed, action=edge.action.name, node=node, waypoints=_wps(path))
        executed += 1
        inc = _remaining_from(inc, node)

        for e in [e for e in pending if e.after_action is not None and e.after_action == executed - 1]:
            pending.remove(e)
            apply_event(e)
            tr.log("event", t, event=e.to_dict())
            if _blocked(engine, inc, node, None, None):
                inc = replan()
                if inc is None:
                    return _fail(tr, t)

    tr.gate_ok = revalidate(engine, tr, appeared)
    if not tr.gate_ok:
        tr.outcome, tr.reason = "Failure", "SoundnessGate"
        tr.log("failure", t, reason=tr.reason)
        return tr
    tr.outcome = "Success"
    tr.log("success", t, replans=tr.replans)
    return tr


def _wps(path: MotionPath) -> list:
    return [[round(t, 6)] + [round(v, 6) for v in c.to_list()] for t, c in path.waypoints]


def _fail(tr: ExecutionTrace, t: float) -> ExecutionTrace:
    tr.outcome, tr.reason = "Failure", "AttemptsExhausted"
    tr.log("failure", t, reason=tr.reason, replans=tr.replans)
    return tr


def revalidate(engine: Engine, tr: ExecutionTrace, appeared: Optional[dict] = None) -> bool:
    """Eager sweep of every executed segment.

    Each segment is checked in the world it ran in, plus every appeared
    obstacle still resting where it appeared.
    """
    appeared = appeared or {}
    for path, w in tr.segments:
        for oid, pose in appeared.items():
            if not w.has_movable(oid) and engine.world.has_movable(oid) and oid != w.held:
                w = w.with_movable(engine.world.movable(oid).with_pose(pose))
        probe = MotionPath(path.action, list(path.waypoints))
        if validate(probe, w, engine.cfg.planner.sweep_step) is not None:
            return False
    return True
