"""Lazy KPIECE-style planner for a kinematic SE(2) base.

A tree is grown guided by a single (x, y) grid projection. Cells are split
into exterior (some 4-neighbour missing) and interior ones; selection favours
exterior cells and, within a class, the cell with the highest importance
``score / ((1 + selections) * (1 + coverage))``.

In lazy mode only new tree nodes are point-checked; edges are swept when the
caller validates a candidate path. Invalid edges are cut from the tree and
growth resumes. In eager mode every new edge is swept on insertion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .world import (DEFAULT_STEP, CheckCounter, Collision, Config, MotionPath, WorldState,
                    collision_free, segment_status, time_parameterize, wrap_angle)


class NoPath(Exception):
    pass


class StartInvalid(Exception):
    pass


@dataclass
class PlannerConfig:
    cell_m: float = 0.25
    step_m: float = 0.5
    goal_bias: float = 0.05
    exterior_bias: float = 0.7
    max_iters: int = 5000
    seed: int = 0
    goal_tol: float = 0.05
    goal_tol_theta: float = 0.1
    sweep_step: float = DEFAULT_STEP
    shortcut: bool = True
    shortcut_passes: int = 3
    lazy: bool = True

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "PlannerConfig":
        d = dict(d or {})
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        return cls(**known)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class Cell:
    motions: int = 0
    coverage: float = 0.0
    selections: int = 0
    score: float = 1.0
    interior: bool = False
    members: list[int] = field(default_factory=list)


class CellGrid:
    def __init__(self, cell_m: float):
        self.cell_m = cell_m
        self.cells: dict[tuple[int, int], Cell] = {}

    def key(self, c: Config) -> tuple[int, int]:
        return (int(math.floor(c.x / self.cell_m)), int(math.floor(c.y / self.cell_m)))

    def add(self, node: int, c: Config, seg_len: float) -> None:
        k = self.key(c)
        cell = self.cells.get(k)
        if cell is None:
            cell = Cell()
            self.cells[k] = cell
            for nk in (k, (k[0] + 1, k[1]), (k[0] - 1, k[1]), (k[0], k[1] + 1), (k[0], k[1] - 1)):
                self._refresh(nk)
        cell.motions += 1
        cell.coverage += seg_len
        cell.members.append(node)

    def _refresh(self, k):
        cell = self.cells.get(k)
        if cell is None:
            return
        i, j = k
        cell.interior = all(n in self.cells for n in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)))

    def drop_dead(self, alive: list[bool]) -> None:
        """Forget cells whose every motion was cut, so the region can regrow."""
        dead = [k for k, c in self.cells.items() if not any(alive[m] for m in c.members)]
        for k in dead:
            del self.cells[k]
        for k in dead:
            i, j = k
            for nk in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                self._refresh(nk)

    def select(self, rng: np.random.Generator, exterior_bias: float) -> Optional[tuple[int, int]]:
        ext = [k for k, c in self.cells.items() if not c.interior]
        inn = [k for k, c in self.cells.items() if c.interior]
        if not ext and not inn:
            return None
        pool = ext if (ext and (not inn or rng.random() < exterior_bias)) else inn

        def importance(k):
            c = self.cells[k]
            return c.score / ((1 + c.selections) * (1 + c.coverage))

        best = max(pool, key=lambda k: (importance(k), -k[0], -k[1]))
        self.cells[best].selections += 1
        return best


class KPIECE:
    """One planning episode (tree + grid + counters) from ``start`` to ``goal``."""

    def __init__(self, start: Config, goal: Config, world: WorldState, cfg: PlannerConfig,
                 counter: Optional[CheckCounter] = None, ignore_movables: bool = False):
        self.start, self.goal, self.world, self.cfg = start, goal, world, cfg
        self.counter = counter if counter is not None else CheckCounter()
        self.ignore_movables = ignore_movables
        self.rng = np.random.default_rng(cfg.seed)
        self.nodes: list[Config] = [start]
        self.parent: list[int] = [-1]
        self.alive: list[bool] = [True]
        self.grid = CellGrid(cfg.cell_m)
        self.iterations = 0
        self.solution: Optional[int] = None
        if collision_free(start, world, ignore_movables=ignore_movables, counter=self.counter) is not None:
            raise StartInvalid(f"start {start} is in collision")
        self.grid.add(0, start, 0.0)
        self._check_goal(0)

    def _close(self, c: Config) -> bool:
        return c.dist(self.goal) <= self.cfg.goal_tol

    def _check_goal(self, idx: int) -> None:
        if self.solution is None and self._close(self.nodes[idx]):
            self.solution = idx

    def _sample(self) -> tuple[float, float]:
        if self.rng.random() < self.cfg.goal_bias:
            return self.goal.x, self.goal.y
        (xmin, ymin), (xmax, ymax) = self.world.bounds
        return float(self.rng.uniform(xmin, xmax)), float(self.rng.uniform(ymin, ymax))

    def grow(self) -> Optional[int]:
        """Run until a node reaches the goal or the iteration budget runs out."""
        cfg = self.cfg
        while self.solution is None and self.iterations < cfg.max_iters:
            self.iterations += 1
            k = self.grid.select(self.rng, cfg.exterior_bias)
            if k is None:
                break
            cell = self.grid.cells[k]
            members = [m for m in cell.members if self.alive[m]]
            if not members:
                cell.score = max(cell.score * 0.5, 1e-6)
                continue
            src = members[int(self.rng.integers(len(members)))]
            a = self.nodes[src]
            tx, ty = self._sample()
            dx, dy = tx - a.x, ty - a.y
            dist = math.hypot(dx, dy)
            if dist < 1e-9:
                continue
            length = min(dist, float(self.rng.uniform(0.1 * cfg.step_m, cfg.step_m)))
            if dist <= cfg.step_m and (tx, ty) == (self.goal.x, self.goal.y):
                length = dist
            heading = math.atan2(dy, dx)
            new = Config(a.x + dx / dist * length, a.y + dy / dist * length, heading)
            if collision_free(new, self.world, ignore_movables=self.ignore_movables, counter=self.counter) is not None:
                cell.score = max(cell.score * 0.9, 1e-6)
                continue
            if not cfg.lazy:
                if segment_status(a, new, self.world, cfg.sweep_step, ignore_movables=self.ignore_movables,
                                  counter=self.counter) is not None:
                    cell.score = max(cell.score * 0.9, 1e-6)
                    continue
            idx = len(self.nodes)
            self.nodes.append(new)
            self.parent.append(src)
            self.alive.append(True)
            self.grid.add(idx, new, length)
            self._check_goal(idx)
        return self.solution

    def branch(self, idx: int) -> list[int]:
        out = []
        while idx >= 0:
            out.append(idx)
            idx = self.parent[idx]
        return out[::-1]

    def cut(self, child: int) -> None:
        """Remove the edge into ``child`` (and its subtree) after a failed sweep."""
        stack = [child]
        kids: dict[int, list[int]] = {}
        for i, p in enumerate(self.parent):
            kids.setdefault(p, []).append(i)
        while stack:
            n = stack.pop()
            if not self.alive[n]:
                continue
            self.alive[n] = False
            stack.extend(kids.get(n, []))
        self.grid.drop_dead(self.alive)
        if self.solution is not None and not self.alive[self.solution]:
            self.solution = None
        # another live node may already sit at the goal
        for i, c in enumerate(self.nodes):
            if self.alive[i] and self._close(c):
                self.solution = i
                break


def _configs_of(tree: KPIECE, branch: list[int], goal: Config) -> list[Config]:
    cs = [tree.nodes[i] for i in branch]
    last = cs[-1]
    if last.dist(goal) > 1e-12:
        cs.append(Config(goal.x, goal.y, math.atan2(goal.y - last.y, goal.x - last.x)))
    cs[-1] = Config(goal.x, goal.y, goal.theta)
    return cs


def plan_motion(start: Config, goal: Config, w: WorldState, cfg: PlannerConfig, *, action: str = "",
                surcharge: float = 0.0, counter: Optional[CheckCounter] = None,
                ignore_movables: bool = False) -> MotionPath:
    """Grow a tree until the goal is reached; return the branch unchecked (lazy)."""
    if start.dist(goal) <= cfg.goal_tol:
        cs = [start, Config(start.x, start.y, goal.theta)] if abs(wrap_angle(goal.theta - start.theta)) > cfg.goal_tol_theta else [start]
        return time_parameterize(cs, w.robot, surcharge, action=action)
    tree = KPIECE(start, goal, w, cfg, counter, ignore_movables)
    sol = tree.grow()
    if sol is None:
        raise NoPath(f"no path after {tree.iterations} iterations")
    return time_parameterize(_configs_of(tree, tree.branch(sol), goal), w.robot, surcharge, action=action)


def validate(path: MotionPath, w: WorldState, step: float = DEFAULT_STEP, *,
             counter: Optional[CheckCounter] = None, ignore_movables: bool = False,
             ignore=()) -> Optional[Collision]:
    """Sweep each segment in order; mark the path valid or invalid(first hit)."""
    cs = path.configs
    if len(cs) == 1 or all(a.xy == b.xy and a.theta == b.theta for a, b in zip(cs, cs[1:])):
        hit = collision_free(cs[0], w, ignore_movables=ignore_movables, counter=counter)
        if hit is not None:
            path.validated, path.collision = "invalid", Collision(hit.kind, hit.id, 0.0, 0)
            return path.collision
    for k, (a, b) in enumerate(zip(cs, cs[1:])):
        if a == b:
            continue
        hit = segment_status(a, b, w, step, counter=counter, ignore_movables=ignore_movables, ignore=ignore)
        if hit is not None:
            path.validated = "invalid"
            path.collision = Collision(hit.kind, hit.id, hit.s, k)
            return path.collision
    path.validated = "valid"
    path.collision = None
    return None


def shortcut(configs: list[Config], w: WorldState, step: float = DEFAULT_STEP, *,
             counter: Optional[CheckCounter] = None, passes: int = 3, spacing: float = 0.25,
             ignore_movables: bool = False) -> list[Config]:
    """Greedy farthest-visible shortcutting over a densified copy of the path."""
    if len(configs) <= 2:
        return list(configs)
    cur = list(configs)
    for _ in range(passes):
        dense = _densify(cur, spacing)
        out = [dense[0]]
        i = 0
        n = len(dense)
        while i < n - 1:
            # binary search for the farthest index reachable by a clear segment
            lo, hi = i + 1, n - 1
            best = i + 1
            if segment_status(dense[i], dense[hi], w, step, counter=counter,
                              ignore_movables=ignore_movables) is None:
                best, lo = hi, hi + 1
            while lo <= hi:
                mid = (lo + hi) // 2
                if segment_status(dense[i], dense[mid], w, step, counter=counter,
                                  ignore_movables=ignore_movables) is None:
                    best = mid
                    lo = mid + 1
                else:
                    hi = mid - 1
            out.append(dense[best])
            i = best
        out[-1] = configs[-1]
        if _length(out) >= _length(cur) - 1e-9:
            break
        cur = out
    cur[0], cur[-1] = configs[0], configs[-1]
    return cur


def _length(cs: list[Config]) -> float:
    return sum(a.dist(b) for a, b in zip(cs, cs[1:]))


def _densify(cs: list[Config], spacing: float) -> list[Config]:
    out = [cs[0]]
    for a, b in zip(cs, cs[1:]):
        d = a.dist(b)
        k = max(1, int(math.ceil(d / spacing)))
        for j in range(1, k + 1):
            f = j / k
            out.append(Config(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f, b.theta))
    return out


def plan_valid_motion(start: Config, goal: Config, w: WorldState, cfg: PlannerConfig, *, action: str = "",
                      surcharge: float = 0.0, counter: Optional[CheckCounter] = None) -> MotionPath:
    """A collision-free path: lazy grow/validate/cut loop, or eager growth.

    The result is validated, optionally shortcut, and time-parameterised.
    """
    counter = counter if counter is not None else CheckCounter()
    if start.dist(goal) <= cfg.goal_tol:
        path = plan_motion(start, goal, w, cfg, action=action, surcharge=surcharge, counter=counter)
        validate(path, w, cfg.sweep_step, counter=counter)
        if path.validated != "valid":
            raise NoPath("start/goal configuration in collision")
        return path
    tree = KPIECE(start, goal, w, cfg, counter)
    while True:
        sol = tree.grow()
        if sol is None:
            raise NoPath(f"no path after {tree.iterations} iterations")
        branch = tree.branch(sol)
        cs = _configs_of(tree, branch, goal)
        if not cfg.lazy:
            # tree edges are already swept; only the goal snap remains
            tail = segment_status(cs[-2], cs[-1], w, cfg.sweep_step, counter=counter) if len(cs) > len(branch) else None
            if tail is None:
                break
            tree.cut(branch[-1])
            continue
        bad = None
        for k, (a, b) in enumerate(zip(cs, cs[1:])):
            if segment_status(a, b, w, cfg.sweep_step, counter=counter) is not None:
                bad = k
                break
        if bad is None:
            break
        tree.cut(branch[min(bad + 1, len(branch) - 1)])
    if cfg.shortcut:
        cs = shortcut(cs, w, cfg.sweep_step, counter=counter, passes=cfg.shortcut_passes)
    path = time_parameterize(cs, w.robot, surcharge, action=action)
    path.validated = "valid"
    return path
