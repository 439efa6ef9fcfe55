"""FF-style satisficing planner.

Delete-relaxed planning graph heuristic with relaxed-plan extraction,
helpful-action pruning, enforced hill-climbing and a greedy best-first
fallback. Negative preconditions are ignored in the relaxation; negative
goals are relaxed as "some reachable action deletes the atom".
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .pddl import GroundAction, GroundTask, State, applicable, apply, satisfies

DEFAULT_EHC_CAP = 50_000


class GoalUnreachable(Exception):
    pass


@dataclass
class RPG:
    """Layered delete-relaxed planning graph.

    ``fact_level[a]`` is the first layer atom ``a`` appears in,
    ``del_level[a]`` the first layer some reachable action deletes it and
    ``action_level[i]`` the first layer action ``i`` becomes applicable.
    """

    state: State
    fact_level: dict[int, int]
    del_level: dict[int, int]
    action_level: dict[int, int]
    layers: list[list[int]]
    goal_pos: frozenset
    goal_neg: frozenset
    reached: bool

    @property
    def n_layers(self) -> int:
        return len(self.layers)


@dataclass
class RelaxedPlan:
    layers: list[list[GroundAction]]
    h_value: int
    helpful: list[GroundAction] = field(default_factory=list)
    subgoals_1: frozenset = frozenset()
    delgoals_1: frozenset = frozenset()


@dataclass
class Plan:
    states: list[State]
    actions: list[GroundAction]

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def steps(self) -> list:
        out: list = [self.states[0]]
        for a, s in zip(self.actions, self.states[1:]):
            out.extend([a, s])
        return out

    def validate(self, goal_pos: frozenset, goal_neg: frozenset = frozenset()) -> bool:
        if len(self.states) != len(self.actions) + 1:
            return False
        for s, a, nxt in zip(self.states, self.actions, self.states[1:]):
            if not applicable(s, a) or apply(s, a) != nxt:
                return False
        return satisfies(self.states[-1], goal_pos, goal_neg)


class DeadEnd:
    def __repr__(self) -> str:
        return "DeadEnd"


class Unsolvable:
    def __repr__(self) -> str:
        return "Unsolvable"


DEAD_END = DeadEnd()
UNSOLVABLE = Unsolvable()


def _goal_at(facts: dict, dels: dict, s: State, gpos, gneg) -> bool:
    return all(g in facts for g in gpos) and all(g not in s or g in dels for g in gneg)


def build_rpg(s: State, task: GroundTask, goal_pos: Optional[frozenset] = None,
              goal_neg: Optional[frozenset] = None,
              allowed: Optional[Sequence[GroundAction]] = None) -> RPG:
    gpos = task.goal_pos if goal_pos is None else goal_pos
    gneg = task.goal_neg if goal_neg is None else goal_neg
    actions = task.actions if allowed is None else allowed
    fact_level = {a: 0 for a in s}
    del_level: dict[int, int] = {}
    action_level: dict[int, int] = {}
    layers: list[list[int]] = []
    pending = [a for a in actions]
    while not _goal_at(fact_level, del_level, s, gpos, gneg):
        k = len(layers)
        layer = []
        rest = []
        for a in pending:
            if all(p in fact_level for p in a.precon_pos):
                layer.append(a.index)
            else:
                rest.append(a)
        if not layer:
            return RPG(s, fact_level, del_level, action_level, layers, gpos, gneg, False)
        layers.append(layer)
        by_index = {a.index: a for a in pending}
        for i in layer:
            action_level[i] = k
            act = by_index[i]
            for f in act.add:
                fact_level.setdefault(f, k + 1)
            for f in act.delete:
                del_level.setdefault(f, k + 1)
        pending = rest
    return RPG(s, fact_level, del_level, action_level, layers, gpos, gneg, True)


def h_max(rpg: RPG) -> int:
    if not rpg.reached:
        return -1
    lv = [rpg.fact_level[g] for g in rpg.goal_pos]
    lv += [rpg.del_level[g] for g in rpg.goal_neg if g in rpg.state]
    return max(lv, default=0)


def extract_relaxed_plan(rpg: RPG, task: GroundTask) -> RelaxedPlan:
    """Backward extraction, goals assigned to their first layer (NOOP-first).

    Achiever choice: lowest action index among the actions of the layer
    just below the subgoal, which is the earliest layer that can support it.
    """
    if not rpg.reached:
        raise GoalUnreachable()
    top = max(h_max(rpg), 0)
    goals: list[set[int]] = [set() for _ in range(top + 1)]
    delgoals: list[set[int]] = [set() for _ in range(top + 1)]
    for g in rpg.goal_pos:
        goals[rpg.fact_level[g]].add(g)
    for g in rpg.goal_neg:
        if g in rpg.state:
            delgoals[rpg.del_level[g]].add(g)
    marked_true: list[set[int]] = [set() for _ in range(top + 2)]
    marked_del: list[set[int]] = [set() for _ in range(top + 2)]
    chosen: list[list[GroundAction]] = [[] for _ in range(top)]
    acts = task.actions

    subgoals_1 = frozenset(goals[1]) if top >= 1 else frozenset()
    delgoals_1 = frozenset(delgoals[1]) if top >= 1 else frozenset()
    for k in range(top, 0, -1):
        for g in sorted(goals[k]):
            if g in marked_true[k]:
                continue
            ach = min((i for i in rpg.layers[k - 1] if g in acts[i].add), default=None)
            _use(ach, k, acts, rpg, goals, delgoals, marked_true, marked_del, chosen)
        for g in sorted(delgoals[k]):
            if g in marked_del[k]:
                continue
            ach = min((i for i in rpg.layers[k - 1] if g in acts[i].delete), default=None)
            _use(ach, k, acts, rpg, goals, delgoals, marked_true, marked_del, chosen)
        if k == 1:
            subgoals_1 = frozenset(goals[1])
            delgoals_1 = frozenset(delgoals[1])
    h = sum(len(l) for l in chosen)
    return RelaxedPlan(chosen, h, [], subgoals_1, delgoals_1)


def _use(ach, k, acts, rpg, goals, delgoals, marked_true, marked_del, chosen):
    assert ach is not None, "relaxed graph inconsistent"
    a = acts[ach]
    if a in chosen[k - 1]:
        return
    chosen[k - 1].append(a)
    for p in a.precon_pos:
        lvl = rpg.fact_level[p]
        if lvl > 0 and p not in marked_true[k - 1]:
            goals[lvl].add(p)
    for f in a.add:
        marked_true[k].add(f)
        marked_true[k - 1].add(f)
    for f in a.delete:
        marked_del[k].add(f)
        marked_del[k - 1].add(f)


def helpful_actions(rp: RelaxedPlan, s: State, task: GroundTask,
                    allowed: Optional[Sequence[GroundAction]] = None) -> list[GroundAction]:
    if rp.h_value == 0:
        return []
    actions = task.actions if allowed is None else allowed
    return [a for a in actions
            if applicable(s, a) and ((a.add & rp.subgoals_1) or (a.delete & rp.delgoals_1))]


class Heuristic:
    """h_FF evaluator with memoisation and an expansion counter."""

    def __init__(self, task: GroundTask, goal_pos=None, goal_neg=None, allowed=None):
        self.task = task
        self.goal_pos = task.goal_pos if goal_pos is None else frozenset(goal_pos)
        self.goal_neg = task.goal_neg if goal_neg is None else frozenset(goal_neg)
        self.allowed = allowed
        self.cache: dict[State, tuple[int, Optional[RelaxedPlan]]] = {}
        self.evaluated: list[tuple[State, int, int]] = []  # (state, h_ff, h_max)

    def __call__(self, s: State) -> tuple[int, Optional[RelaxedPlan]]:
        hit = self.cache.get(s)
        if hit is not None:
            return hit
        rpg = build_rpg(s, self.task, self.goal_pos, self.goal_neg, self.allowed)
        if not rpg.reached:
            out = (-1, None)
            self.evaluated.append((s, -1, -1))
        else:
            rp = extract_relaxed_plan(rpg, self.task)
            rp.helpful = helpful_actions(rp, s, self.task, self.allowed)
            out = (rp.h_value, rp)
            self.evaluated.append((s, rp.h_value, h_max(rpg)))
        self.cache[s] = out
        return out


def _actions_view(task: GroundTask, forbidden: Iterable[int]) -> Optional[list[GroundAction]]:
    forbidden = frozenset(forbidden)
    if not forbidden:
        return None
    return [a for a in task.actions if a.index not in forbidden]


def _simplify(states: list[State], actions: list[GroundAction]) -> Plan:
    # cut loops so the plan never revisits a state
    out_s = [states[0]]
    out_a: list[GroundAction] = []
    pos = {states[0]: 0}
    for a, s in zip(actions, states[1:]):
        if s in pos:
            cut = pos[s]
            for dropped in out_s[cut + 1:]:
                del pos[dropped]
            out_s = out_s[:cut + 1]
            out_a = out_a[:cut]
            continue
        out_a.append(a)
        out_s.append(s)
        pos[s] = len(out_s) - 1
    return Plan(out_s, out_a)


def ehc(task: GroundTask, *, cap: int = DEFAULT_EHC_CAP, heuristic: Optional[Heuristic] = None,
        forbidden: Iterable[int] = ()):
    """Enforced hill-climbing restricted to helpful actions.

    Returns a Plan, or DEAD_END when a breadth-first improvement search
    exhausts its frontier (or ``cap`` states) without finding a better state.
    """
    allowed = _actions_view(task, forbidden)
    h = heuristic or Heuristic(task, allowed=allowed)
    s = task.init
    hv, rp = h(s)
    if hv < 0:
        return DEAD_END
    states, actions = [s], []
    while hv > 0:
        found = None
        queue = deque([(s, [])])
        seen = {s}
        expanded = 0
        while queue and found is None:
            cur, path = queue.popleft()
            _, cur_rp = h(cur)
            if cur_rp is None:
                continue
            expanded += 1
            if expanded > cap:
                return DEAD_END
            for a in cur_rp.helpful:
                nxt = apply(cur, a)
                if nxt in seen:
                    continue
                seen.add(nxt)
                nh, _ = h(nxt)
                if 0 <= nh < hv:
                    found = (nxt, path + [a], nh)
                    break
                queue.append((nxt, path + [a]))
        if found is None:
            return DEAD_END
        nxt, path, hv = found
        for a in path:
            s = apply(s, a)
            states.append(s)
            actions.append(a)
    return _simplify(states, actions)


def best_first(task: GroundTask, *, heuristic: Optional[Heuristic] = None,
               forbidden: Iterable[int] = (), max_expansions: Optional[int] = None):
    """Greedy best-first search on h_FF over all applicable actions."""
    allowed = _actions_view(task, forbidden)
    h = heuristic or Heuristic(task, allowed=allowed)
    acts = task.actions if allowed is None else allowed
    s0 = task.init
    h0, _ = h(s0)
    if h0 < 0:
        return UNSOLVABLE
    counter = 0
    heap = [(h0, counter, s0)]
    parent: dict[State, tuple[Optional[State], Optional[GroundAction]]] = {s0: (None, None)}
    expansions = 0
    while heap:
        hv, _, s = heapq.heappop(heap)
        if satisfies(s, h.goal_pos, h.goal_neg):
            actions = []
            states = [s]
            while parent[s][0] is not None:
                prev, a = parent[s]
                actions.append(a)
                states.append(prev)
                s = prev
            return Plan(states[::-1], actions[::-1])
        expansions += 1
        if max_expansions is not None and expansions > max_expansions:
            return UNSOLVABLE
        for a in acts:
            if not applicable(s, a):
                continue
            nxt = apply(s, a)
            if nxt in parent:
                continue
            nh, _ = h(nxt)
            parent[nxt] = (s, a)
            if nh < 0:
                continue
            counter += 1
            heapq.heappush(heap, (nh, counter, nxt))
    return UNSOLVABLE


def tp(s0: State, goal_pos: Iterable[int], goal_neg: Iterable[int], task: GroundTask, *,
       forbidden: Iterable[int] = (), ehc_cap: int = DEFAULT_EHC_CAP):
    """TP(s0, goal, A): EHC first, greedy best-first on dead ends."""
    sub = task.with_init(s0).with_goal(goal_pos, goal_neg)
    forbidden = frozenset(forbidden)
    allowed = _actions_view(sub, forbidden)
    h = Heuristic(sub, allowed=allowed)
    plan = ehc(sub, cap=ehc_cap, heuristic=h, forbidden=forbidden)
    if isinstance(plan, DeadEnd):
        plan = best_first(sub, heuristic=h, forbidden=forbidden)
    if isinstance(plan, Plan):
        assert plan.validate(sub.goal_pos, sub.goal_neg)
    return plan
