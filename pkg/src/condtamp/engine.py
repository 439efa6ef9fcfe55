"""Effort-minimising task and motion planning over a reachability graph.

The engine owns the symbolic task, the geometric world and the graph. It
plans one symbolic plan, turns it into a graph, then searches the graph
depth first, attaching a validated motion to each edge it crosses and
pruning any partial plan whose accumulated effort already reaches the best
complete one. Collisions with movable objects spawn relocation branches.

Domain vocabulary expected by the geometry binding (see README):
``robot-at ?base``, ``obj-at ?obj ?slot``, ``holding ?gripper ?obj``,
``reach ?base ?slot``, ``slot-for ?slot ?obj``, ``graspable ?obj`` and the
``pick`` / ``place`` schemas taking ``(?obj ?gripper ?base ?slot)``.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ff import UNSOLVABLE, Plan, tp
from .kpiece import NoPath, PlannerConfig, StartInvalid, plan_motion, plan_valid_motion, shortcut, validate
from .pddl import (DomainDef, GroundAction, GroundTask, ProblemDef, State, apply, ground, satisfies)
from .rgraph import CycleRejected, RGraph
from .world import (CheckCounter, Config, MotionPath, MovableObject, WorldState, collision_free,
                    find_grasps, sample_placement, segment_status, time_parameterize)

ROBOT_AT, OBJ_AT, HOLDING = "robot-at", "obj-at", "holding"
REACH, SLOT_FOR, GRASPABLE = "reach", "slot-for", "graspable"
PICK, PLACE = "pick", "place"

POSE_DIGITS = 3


@dataclass
class EngineConfig:
    max_attempts: int = 5
    n_placements: int = 3
    placement_radius: float = 1.5
    placement_resamples: int = 10
    standoff_clearance: float = 0.30
    seed: int = 0
    planner: PlannerConfig = field(default_factory=PlannerConfig)

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")

    @classmethod
    def from_dict(cls, d: Optional[dict], planner: Optional[dict] = None) -> "EngineConfig":
        d = dict(d or {})
        known = {k: d[k] for k in ("max_attempts", "n_placements", "placement_radius",
                                   "placement_resamples", "standoff_clearance", "seed") if k in d}
        return cls(planner=PlannerConfig.from_dict(planner), **known)


@dataclass
class Incumbent:
    plan: list[int]
    actions: list[str]
    paths: list[MotionPath]
    c_star: float

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.plan, self.plan[1:]))

    @property
    def t_star(self) -> MotionPath:
        wps: list = []
        t = 0.0
        for p in self.paths:
            q = p.shifted(t - p.waypoints[0][0])
            wps.extend(q.waypoints if not wps else q.waypoints[1:] if q.waypoints[0] == wps[-1] else q.waypoints)
            t = q.waypoints[-1][0]
        return MotionPath("plan", wps, "valid")

    def to_jsonl(self) -> str:
        lines = [json.dumps({"v": 1, "type": "incumbent", "c_star": round(self.c_star, 6),
                             "plan": self.plan, "actions": self.actions}, sort_keys=True)]
        t = 0.0
        for (u, v), a, p in zip(self.edges, self.actions, self.paths):
            d = p.shifted(t - p.waypoints[0][0]).to_dict()
            d.update({"v": 1, "type": "edge", "parent": u, "child": v, "action": a})
            lines.append(json.dumps(d, sort_keys=True))
            t += p.effort_s
        return "\n".join(lines) + "\n"


@dataclass
class Failure:
    reason: str
    detail: str = ""

    def __bool__(self) -> bool:
        return False


def pose_key(c: Config) -> tuple[float, float, float]:
    return (round(c.x, POSE_DIGITS), round(c.y, POSE_DIGITS), round(c.theta, POSE_DIGITS))


class Engine:
    """Mutable planning state for one scenario (single writer)."""

    def __init__(self, domain: DomainDef, problem: ProblemDef, world: WorldState,
                 cfg: Optional[EngineConfig] = None, *, contingencies: Optional[dict] = None):
        self.domain = domain
        self.problem = problem
        self.world = world
        self.cfg = cfg or EngineConfig()
        self.task: GroundTask = ground(domain, problem)
        self.goal_pos, self.goal_neg = self.task.goal_pos, self.task.goal_neg
        self.counter = CheckCounter()
        self.trace: list[dict] = []
        self.obstacles: set[tuple[str, tuple]] = set()
        self.poses: dict[str, Config] = world.anchor_map()
        self._bind_slots()
        self.contingencies = {k: self._condition_state(v) for k, v in (contingencies or {}).items()}
        self.graph: Optional[RGraph] = None
        self.override: Optional[tuple[int, Config]] = None
        self.failed: set[tuple[int, int]] = set()
        self.epoch = 0
        self.attempts = self.cfg.max_attempts
        self._drop_count: dict[str, int] = {}
        self._world_cache: dict = {}
        self._motion: dict[tuple[int, int], Optional[MotionPath]] = {}
        self._candidate: dict[tuple[int, int], tuple[Optional[MotionPath], bool, list[str]]] = {}
        self._best: Optional[Incumbent] = None
        self._seen: dict[int, float] = {}
        self.incumbents: dict[int, Incumbent] = {}

    # -- symbolic/geometric binding ------------------------------------------
    def _bind_slots(self) -> None:
        for pred, *args in self.problem.init:
            if pred == OBJ_AT and args[1] not in self.poses and self.world.has_movable(args[0]):
                self.poses[args[1]] = self.world.movable(args[0]).pose

    def _condition_state(self, cond: dict) -> State:
        add = {tuple(a) for a in cond.get("add", [])}
        delete = {tuple(a) for a in cond.get("delete", [])}
        for a in add:
            if a not in self.task.atom_index:
                raise ValueError(f"condition atom {a} is not a fluent of the task")
        init_atoms = set(self.task.atoms_of(self.task.init))
        return self.task.state_of((init_atoms - delete) | add)

    def _type_of(self, name: str) -> str:
        for n, t in self.problem.objects:
            if n == name:
                return t
        for n, t in self.domain.constants:
            if n == name:
                return t
        raise KeyError(name)

    def world_of(self, state: State, config: Optional[Config] = None) -> WorldState:
        key = (state, config)
        w = self._world_cache.get(key)
        if w is not None:
            return w
        w = self.world
        robot_cfg, held = None, None
        for pred, *args in self.task.atoms_of(state):
            if pred == ROBOT_AT and args[0] in self.poses:
                robot_cfg = self.poses[args[0]]
            elif pred == OBJ_AT and w.has_movable(args[0]) and args[1] in self.poses:
                w = w.with_movable_pose(args[0], self.poses[args[1]])
            elif pred == HOLDING and w.has_movable(args[1]):
                held = args[1]
        if config is not None:
            robot_cfg = config
        if robot_cfg is None:
            robot_cfg = self.world.config
        if held is not None:
            w = w.with_movable_pose(held, robot_cfg)
        w = w.with_config(robot_cfg).with_held(held)
        self._world_cache[key] = w
        return w

    def world_at(self, nid: int) -> WorldState:
        cfg = self.override[1] if self.override is not None and self.override[0] == nid else None
        return self.world_of(self.graph.nodes[nid].state, cfg)

    def is_goal(self, state: State) -> bool:
        return satisfies(state, self.goal_pos, self.goal_neg)

    # -- bookkeeping ----------------------------------------------------------
    def log(self, kind: str, **data) -> None:
        rec = {"v": 1, "seq": len(self.trace), "kind": kind, "epoch": self.epoch}
        rec.update(data)
        rec["checks"] = self.counter.snapshot()
        self.trace.append(rec)

    def trace_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.trace)

    def seed_for(self, *parts) -> int:
        tag = "|".join(str(p) for p in parts)
        return (self.cfg.seed ^ zlib.crc32(tag.encode())) & 0xFFFFFFFF

    def _planner(self, *parts) -> PlannerConfig:
        return PlannerConfig(**{**self.cfg.planner.to_dict(), "seed": self.seed_for(*parts, self.epoch)})

    def invalidate(self) -> None:
        """Forget every cached world and motion (geometry changed)."""
        self.epoch += 1
        self._world_cache.clear()
        self._motion.clear()
        self._candidate.clear()
        if self.graph is not None:
            self.graph.clear_annotations()

    def _tp(self, s0: State, gpos, gneg=(), forbidden=()) -> Optional[Plan]:
        res = tp(s0, gpos, gneg, self.task, forbidden=forbidden)
        ok = res is not UNSOLVABLE
        self.log("tp", goal=sorted(" ".join(a) for a in self.task.atoms_of(frozenset(gpos))),
                 result=[a.name for a in res.actions] if ok else "unsolvable")
        return res if ok else None

    def _splice(self, p: Plan) -> bool:
        try:
            self.graph.update(p)
        except CycleRejected as exc:
            self.log("splice_rejected", reason=str(exc), actions=[a.name for a in p.actions])
            return False
        self.log("splice", actions=[a.name for a in p.actions])
        return True

    def _regrounded(self, objects: list[tuple[str, str]], init: list[tuple]) -> None:
        self.problem = self.problem.with_objects(objects, init)
        self.task = ground(self.domain, self.problem, prior=self.task)

    # -- Algorithm entry point --------------------------------------------------
    def tmp(self) -> "Incumbent | Failure":
        s0 = self.task.init
        self.log("start", init=sorted(" ".join(a) for a in self.task.atoms_of(s0)))
        p = self._tp(s0, self.goal_pos, self.goal_neg)
        if p is None:
            self.log("failure", reason="UnsolvableTask")
            return Failure("UnsolvableTask", "no symbolic plan from the initial state")
        plans = [p]
        for name in sorted(self.contingencies):
            pc = self._tp(self.contingencies[name], self.goal_pos, self.goal_neg)
            if pc is None:
                self.log("failure", reason="UnsolvableTask", condition=name)
                return Failure("UnsolvableTask", f"no symbolic plan under condition {name}")
            plans.append(pc)
        self.graph = RGraph.build(plans)
        self.log("graph", nodes=len(self.graph.nodes), edges=len(self.graph.edges))
        result: "Incumbent | Failure" = Failure("AttemptsExhausted")
        for entry in self.graph.entries:
            seed = self._seed_incumbent(entry)
            res = self.solve_from(entry, seed=seed)
            if entry == self.graph.root():
                result = res
            if isinstance(res, Incumbent):
                self.incumbents[entry] = res
        return result

    def _seed_incumbent(self, entry: int) -> Optional[Incumbent]:
        """Validate the first symbolic plan's lazy motions; +inf when any fails."""
        nodes = [entry]
        while self.graph.children(nodes[-1]) and not self.is_goal(self.graph.nodes[nodes[-1]].state):
            nodes.append(self.graph.children(nodes[-1])[0])
        paths = []
        for u, v in zip(nodes, nodes[1:]):
            cand, clean, _ = self._lazy_candidate(u, v)
            if cand is None or not clean:
                self.log("seed", c_star=None)
                return None
            paths.append(self._edge_motion(u, v))
        if not self.is_goal(self.graph.nodes[nodes[-1]].state) or any(p is None for p in paths):
            return None
        inc = self._incumbent(nodes, paths)
        self.log("seed", c_star=round(inc.c_star, 6))
        return inc

    def _incumbent(self, nodes: list[int], paths: list[MotionPath]) -> Incumbent:
        acts = [self.graph.edge(u, v).action.name for u, v in zip(nodes, nodes[1:])]
        if not paths:
            return Incumbent(nodes, acts, [], 0.0)
        return Incumbent(nodes, acts, paths, float(sum(p.effort_s for p in paths)))

    def solve_from(self, v: int, *, seed: Optional[Incumbent] = None) -> "Incumbent | Failure":
        self.attempts = self.cfg.max_attempts
        while self.attempts > 0:
            self._best = seed
            self._seen = {}
            self.traverse(v, 0.0, (v,))
            best = self._best
            if best is not None and self._gate(best):
                self.log("solved", node=v, c_star=round(best.c_star, 6), actions=best.actions)
                return best
            seed = None
            self.attempts -= 1
            self.log("restart", node=v, attempts=self.attempts)
            if self.attempts > 0:
                self.invalidate()
        self.log("failure", reason="AttemptsExhausted", node=v)
        return Failure("AttemptsExhausted", f"no validated plan from node {v}")

    def _gate(self, inc: Incumbent) -> bool:
        """Eager re-validation of every incumbent edge; bad edges are banned."""
        ok = True
        for (u, v), p in zip(inc.edges, inc.paths):
            probe = MotionPath(p.action, list(p.waypoints))
            if validate(probe, self.world_at(u), self.cfg.planner.sweep_step) is not None:
                self.failed.add((u, v))
                self.log("gate_reject", edge=[u, v])
                ok = False
        return ok

    # -- search -----------------------------------------------------------------
    @property
    def c_star(self) -> float:
        return math.inf if self._best is None else self._best.c_star

    def _lower_bound(self, u: int, v: int) -> float:
        a = self.graph.edge(u, v).action
        wu, wv = self.world_at(u), self.world_of(self.graph.nodes[v].state)
        return wu.config.dist(wv.config) / wu.robot.speed_mps + wu.robot.surcharge(a.schema)

    def _estimate(self, u: int, v: int) -> float:
        e = self.graph.edges[(u, v)]
        if e.effort_s is not None:
            return e.effort_s
        return self._lower_bound(u, v)

    def traverse(self, v: int, cost: float, trail: tuple[int, ...],
                 edges: tuple[MotionPath, ...] = ()) -> None:
        state = self.graph.nodes[v].state
        if self.is_goal(state):
            if cost < self.c_star:
                self._best = self._incumbent(list(trail), list(edges))
                self.log("incumbent", c_star=round(cost, 6), plan=list(trail))
            return
        if cost >= self._seen.get(v, math.inf):
            return
        self._seen[v] = cost
        done: set[int] = set()
        while self.attempts > 0:
            kids = [c for c in self.graph.children(v)
                    if c not in done and (v, c) not in self.failed and c not in trail]
            if not kids:
                break
            c = min(kids, key=lambda k: (self._estimate(v, k), k))
            done.add(c)
            if cost + self._lower_bound(v, c) >= self.c_star:
                self.log("prune", edge=[v, c], bound=round(cost + self._lower_bound(v, c), 6))
                continue
            path = self._edge_motion(v, c)
            if path is None:
                continue
            new = cost + path.effort_s
            if new < self.c_star:
                self.traverse(c, new, trail + (c,), edges + (path,))
            else:
                self.log("prune", edge=[v, c], bound=round(new, 6))

    def _endpoints(self, u: int, v: int) -> tuple[WorldState, Config, float, GroundAction]:
        a = self.graph.edge(u, v).action
        wu = self.world_at(u)
        goal = self.world_of(self.graph.nodes[v].state).config
        return wu, goal, wu.robot.surcharge(a.schema), a

    def _stationary(self, wu: WorldState, goal: Config) -> bool:
        return wu.config.dist(goal) <= self.cfg.planner.goal_tol

    def _euclidean_candidate(self, wu: WorldState, goal: Config, sur: float, name: str,
                             u: int, v: int) -> MotionPath:
        """Shortest-looking route with movables ignored: straight if statics allow."""
        pc = self.cfg.planner
        if segment_status(wu.config, goal, wu, pc.sweep_step, ignore_movables=True, counter=self.counter) is None:
            return time_parameterize([wu.config, goal], wu.robot, sur, action=name)
        cand = plan_motion(wu.config, goal, wu, self._planner("candidate", name, u, v),
                           action=name, surcharge=sur, counter=self.counter, ignore_movables=True)
        cs = shortcut(cand.configs, wu, pc.sweep_step, counter=self.counter, passes=pc.shortcut_passes,
                      ignore_movables=True)
        return time_parameterize(cs, wu.robot, sur, action=name)

    def _lazy_candidate(self, u: int, v: int) -> tuple[Optional[MotionPath], bool, list[str]]:
        """Unchecked motion ignoring movables, then swept against everything.

        Returns (path, clean, movable ids hit along it).
        """
        if (u, v) in self._candidate:
            return self._candidate[(u, v)]
        wu, goal, sur, a = self._endpoints(u, v)
        try:
            if self._stationary(wu, goal):
                cand = time_parameterize([wu.config, Config(wu.config.x, wu.config.y, goal.theta)],
                                         wu.robot, sur, action=a.name)
            else:
                cand = self._euclidean_candidate(wu, goal, sur, a.name, u, v)
        except (NoPath, StartInvalid) as exc:
            self.attempts -= 1
            self.log("motion", edge=[u, v], action=a.name, phase="candidate", result=str(exc))
            self._candidate[(u, v)] = (None, False, [])
            return self._candidate[(u, v)]
        hits, ignored = [], []
        while True:
            hit = validate(cand, wu, self.cfg.planner.sweep_step, counter=self.counter, ignore=ignored)
            if hit is None or hit.kind != "movable":
                break
            hits.append(hit.id)
            ignored.append(hit.id)
        clean = hit is None and not hits
        cand.validated = "valid" if clean else "invalid"
        self._candidate[(u, v)] = (cand, clean, hits)
        self.log("motion", edge=[u, v], action=a.name, phase="candidate",
                 result="valid" if clean else "collision", movables=hits,
                 static=None if hit is None else hit.id)
        return cand, clean, hits

    def _edge_motion(self, u: int, v: int) -> Optional[MotionPath]:
        if (u, v) in self._motion:
            return self._motion[(u, v)]
        cand, clean, hits = self._lazy_candidate(u, v)
        for oid in hits:
            pose = self.world_at(u).movable(oid).pose
            if (oid, pose_key(pose)) not in self.obstacles:
                self.generate_subtasks(u, oid, v)
        wu, goal, sur, a = self._endpoints(u, v)
        path: Optional[MotionPath] = None
        if cand is None:
            path = None
        elif self._stationary(wu, goal):
            path = cand if clean else None
        elif clean:
            cs = shortcut(cand.configs, wu, self.cfg.planner.sweep_step, counter=self.counter,
                          passes=self.cfg.planner.shortcut_passes) if self.cfg.planner.shortcut else cand.configs
            path = time_parameterize(cs, wu.robot, sur, action=a.name)
            path.validated = "valid"
        else:
            try:
                path = plan_valid_motion(wu.config, goal, wu, self._planner("valid", a.name, u, v),
                                         action=a.name, surcharge=sur, counter=self.counter)
            except (NoPath, StartInvalid) as exc:
                self.attempts -= 1
                self.log("motion", edge=[u, v], action=a.name, phase="valid", result=str(exc))
                path = None
        if path is not None:
            self.graph.annotate(u, v, path, path.effort_s, force=True)
            self.log("motion", edge=[u, v], action=a.name, phase="valid", effort_s=round(path.effort_s, 6))
        self._motion[(u, v)] = path
        return path

    # -- relocation subtasks -----------------------------------------------------
    def _current_slot(self, state: State, oid: str) -> Optional[str]:
        for pred, *args in self.task.atoms_of(state):
            if pred == OBJ_AT and args[0] == oid:
                return args[1]
        return None

    def _base_type(self) -> str:
        for pred, *args in self.task.atoms_of(self.task.init):
            if pred == ROBOT_AT:
                return self._type_of(args[0])
        return "base"

    def _standoffs(self, obj: MovableObject, w: WorldState) -> list[Config]:
        """Collision-free approach configs for ``obj`` in ``w`` (robot empty-handed)."""
        w = w.with_held(None).with_movable(obj)
        out = []
        for c in find_grasps(obj, w.robot.gripper_width, self.cfg.standoff_clearance):
            if collision_free(c, w, counter=self.counter) is None:
                out.append(c)
        return out

    def generate_subtasks(self, v: int, oid: str, child: int) -> int:
        """Relocation branches for a newly met movable; returns splices added."""
        w = self.world_at(v)
        obj = w.movable(oid)
        self.obstacles.add((oid, pose_key(obj.pose)))
        self.log("collision", node=v, object=oid, pose=list(pose_key(obj.pose)))
        state = self.graph.nodes[v].state
        slot_now = self._current_slot(state, oid)
        if not obj.graspable or slot_now is None or not find_grasps(obj, w.robot.gripper_width):
            self.log("subtasks", object=oid, added=0)
            return 0
        rng = np.random.default_rng(self.seed_for("placement", oid, pose_key(obj.pose), self.epoch))
        slot_type, base_type = self._type_of(slot_now), self._base_type()
        objects, init, new_slots = [], [], []
        wfree = w.with_held(None)
        for _ in range(self.cfg.n_placements):
            for _ in range(self.cfg.placement_resamples):
                pose = sample_placement(obj, wfree, rng, self.cfg.placement_radius)
                if pose is None:
                    break
                stand = self._standoffs(obj.with_pose(pose), wfree)
                if stand:
                    stand.sort(key=lambda c: (math.hypot(c.x - obj.pose.x, c.y - obj.pose.y), c.theta))
                    j = self._drop_count.get(oid, 0)
                    self._drop_count[oid] = j + 1
                    slot, base = f"{oid}-drop{j}", f"{oid}-drop{j}-base"
                    self.poses[slot], self.poses[base] = pose, stand[0]
                    objects += [(slot, slot_type), (base, base_type)]
                    init += [(REACH, base, slot), (SLOT_FOR, slot, oid)]
                    new_slots.append(slot)
                    break
            else:
                continue
        if not new_slots:
            self.log("subtasks", object=oid, added=0)
            return 0
        self._regrounded(objects, init)
        possible = [a for a in self.task.actions
                    if (a.schema == PICK and a.args[0] == oid and (OBJ_AT, oid, slot_now) in
                        self.task.atoms_of(a.precon_pos))
                    or (a.schema == PLACE and a.args[0] == oid and a.args[-1] in new_slots)]
        child_state = self.graph.nodes[child].state
        target = frozenset(i for i in child_state if oid not in self.task.atoms[i][1:])
        added = 0
        for a in possible:
            pb = self._tp(state, a.precon_pos, a.precon_neg)
            if pb is None:
                self.attempts -= 1
                continue
            s1 = apply(pb.states[-1], a)
            p_before = Plan(list(pb.states) + [s1], list(pb.actions) + [a])
            pa = self._tp(s1, target)
            if pa is None:
                self.attempts -= 1
                continue
            if not (self._splice(p_before) and self._splice(pa)):
                continue
            added += 1
            end = pa.states[-1]
            if not self.is_goal(end):
                rest = self._tp(end, self.goal_pos, self.goal_neg)
                if rest is not None:
                    self._splice(rest)
        self.log("subtasks", object=oid, added=added, slots=new_slots)
        return added

    # -- runtime hooks (executor) ---------------------------------------------
    def perceive(self, obj: MovableObject) -> frozenset:
        """Make a newly seen object known symbolically and geometrically.

        Returns the fluent atoms added to every graph state.
        """
        self.world = self.world.with_movable(obj)
        slot = f"{obj.id}-spot"
        self.poses[slot] = obj.pose
        mov_type = next((t for n, t in self.problem.objects if self.world.has_movable(n) and n != obj.id), "movable")
        slot_type = next((self._type_of(a[1]) for a in (x[1:] for x in self.problem.init if x[0] == OBJ_AT)), "slot")
        objects = [(obj.id, mov_type), (slot, slot_type)]
        init = [(OBJ_AT, obj.id, slot), (SLOT_FOR, slot, obj.id)]
        if obj.graspable:
            init.append((GRASPABLE, obj.id))
            w = self.world.with_held(None)
            for k, c in enumerate(self._standoffs(obj, w)):
                base = f"{slot}-base{k}"
                self.poses[base] = c
                objects.append((base, self._base_type()))
                init.append((REACH, base, slot))
        self._regrounded(objects, init)
        added = frozenset({self.task.index_of((OBJ_AT, obj.id, slot))})
        self.graph.augment(added)
        self.invalidate()
        self.log("perceive", object=obj.id, pose=list(pose_key(obj.pose)))
        return added

    def move_object(self, oid: str, pose: Config, state: State) -> None:
        self.world = self.world.with_movable_pose(oid, pose)
        slot = self._current_slot(state, oid)
        if slot is not None:
            self.poses[slot] = pose
        self.invalidate()
        self.log("object_moved", object=oid, pose=list(pose_key(pose)))

    def replan(self, v: int, config: Config, *, failed_edge: Optional[tuple[int, int]] = None
               ) -> "Incumbent | Failure":
        """Re-search from node ``v`` with the robot physically at ``config``."""
        self.override = (v, config)
        self.invalidate()
        self.log("replan", node=v, config=list(pose_key(config)),
                 failed_edge=None if failed_edge is None else list(failed_edge))
        if failed_edge is not None:
            self.failed.add(failed_edge)
            self.bypass(v, failed_edge)
        res = self.solve_from(v)
        if isinstance(res, Incumbent):
            self.incumbents[v] = res
        return res

    def bypass(self, v: int, edge: tuple[int, int]) -> int:
        """Reach the failed action's effects without it, then the goal."""
        a = self.graph.edge(*edge).action
        state = self.graph.nodes[v].state
        p = self._tp(state, a.add, (), forbidden=[a.index])
        if p is None:
            self.attempts -= 1
            return 0
        if not self._splice(p):
            return 0
        end = p.states[-1]
        if not self.is_goal(end):
            rest = self._tp(end, self.goal_pos, self.goal_neg, forbidden=[a.index])
            if rest is not None:
                self._splice(rest)
        return 1
