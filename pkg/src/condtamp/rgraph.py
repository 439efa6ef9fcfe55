"""Reachability graph: symbolic states as nodes, ground actions as edges.

Nodes are deduplicated by state, so branches that reach the same symbolic
state merge. The graph is kept acyclic; updates only ever add.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .ff import Plan
from .pddl import GroundAction, GroundTask, State, applicable, apply
from .world import MotionPath, WorldState


class InvalidPlan(Exception):
    pass


class DisconnectedPlan(Exception):
    pass


class CycleRejected(Exception):
    pass


class UnknownEdge(KeyError):
    pass


@dataclass
class Node:
    id: int
    state: State
    geom: Optional[WorldState] = None


@dataclass
class Edge:
    parent: int
    child: int
    action: GroundAction
    path: Optional[MotionPath] = None
    effort_s: Optional[float] = None


@dataclass
class RGraph:
    nodes: dict[int, Node] = field(default_factory=dict)
    edges: dict[tuple[int, int], Edge] = field(default_factory=dict)
    root_id: int = 0
    entries: list[int] = field(default_factory=list)
    _by_state: dict = field(default_factory=dict, repr=False)
    _children: dict[int, list[int]] = field(default_factory=dict, repr=False)
    _parents: dict[int, list[int]] = field(default_factory=dict, repr=False)

    # -- construction ---------------------------------------------------------
    @classmethod
    def build(cls, plans: Iterable[Plan]) -> "RGraph":
        g = cls()
        for p in plans:
            _check_chain(p)
            if not g.nodes:
                g.root_id = g._add_node(p.states[0])
                g.entries.append(g.root_id)
            else:
                nid = g._by_state.get(p.states[0])
                if nid is None:
                    nid = g._add_node(p.states[0])
                if nid not in g.entries:
                    g.entries.append(nid)
            g._splice(p)
        return g

    def update(self, p: Plan) -> "RGraph":
        """Splice ``p`` in place (all-or-nothing); returns self."""
        _check_chain(p)
        if p.states[0] not in self._by_state:
            raise DisconnectedPlan("plan does not start at a graph node")
        self._splice(p)
        return self

    def _splice(self, p: Plan) -> None:
        # trial run on copies so a rejected cycle leaves the graph untouched
        nodes, by_state = dict(self.nodes), dict(self._by_state)
        children = {k: list(v) for k, v in self._children.items()}
        parents = {k: list(v) for k, v in self._parents.items()}
        edges = dict(self.edges)
        nxt_id = max(nodes, default=-1) + 1

        def node_for(s):
            nonlocal nxt_id
            nid = by_state.get(s)
            if nid is None:
                nid = nxt_id
                nxt_id += 1
                nodes[nid] = Node(nid, s)
                by_state[s] = nid
                children[nid] = []
                parents[nid] = []
            return nid

        for s, a, s2 in zip(p.states, p.actions, p.states[1:]):
            u, v = node_for(s), node_for(s2)
            if (u, v) in edges:
                continue
            if u == v or _reaches(children, v, u):
                raise CycleRejected(f"edge {a.name} would close a cycle")
            edges[(u, v)] = Edge(u, v, a)
            children[u].append(v)
            parents[v].append(u)
        self.nodes, self._by_state, self._children, self._parents, self.edges = nodes, by_state, children, parents, edges

    def _add_node(self, s: State) -> int:
        nid = max(self.nodes, default=-1) + 1
        self.nodes[nid] = Node(nid, s)
        self._by_state[s] = nid
        self._children[nid] = []
        self._parents[nid] = []
        return nid

    def augment(self, atoms: Iterable[int]) -> None:
        """Add atoms to every node state (newly perceived, persistent facts)."""
        extra = frozenset(atoms)
        if not extra:
            return
        by_state = {}
        for n in self.nodes.values():
            n.state = n.state | extra
            by_state[n.state] = n.id
        self._by_state = by_state

    # -- accessors ------------------------------------------------------------
    def root(self) -> int:
        return self.root_id

    def children(self, n: int) -> list[int]:
        return list(self._children.get(n, []))

    def parents(self, n: int) -> list[int]:
        return list(self._parents.get(n, []))

    def node_of(self, s: State) -> Optional[int]:
        return self._by_state.get(s)

    def edge(self, u: int, v: int) -> Edge:
        try:
            return self.edges[(u, v)]
        except KeyError:
            raise UnknownEdge((u, v)) from None

    def annotate(self, u: int, v: int, path: Optional[MotionPath], effort_s: float, *, force: bool = False) -> bool:
        """Store a motion on an edge; only a strictly lower effort replaces one."""
        e = self.edge(u, v)
        if force or e.effort_s is None or effort_s < e.effort_s:
            e.path, e.effort_s = path, effort_s
            return True
        return False

    def clear_annotations(self) -> None:
        for e in self.edges.values():
            e.path, e.effort_s = None, None

    def paths_from(self, n: int) -> Iterable[list[int]]:
        kids = self._children.get(n, [])
        if not kids:
            yield [n]
            return
        for k in kids:
            for rest in self.paths_from(k):
                yield [n] + rest

    # -- output ---------------------------------------------------------------
    def to_jsonl(self, task: Optional[GroundTask] = None) -> str:
        lines = []
        for nid in sorted(self.nodes):
            n = self.nodes[nid]
            rec = {"type": "node", "id": nid, "root": nid == self.root_id,
                   "state": sorted(n.state) if task is None else [" ".join(a) for a in task.atoms_of(n.state)]}
            lines.append(json.dumps(rec, sort_keys=True))
        for (u, v) in sorted(self.edges):
            e = self.edges[(u, v)]
            rec = {"type": "edge", "parent": u, "child": v, "action": e.action.name,
                   "effort_s": None if e.effort_s is None else round(e.effort_s, 6)}
            lines.append(json.dumps(rec, sort_keys=True))
        return "\n".join(lines) + "\n"


def _check_chain(p: Plan) -> None:
    if len(p.states) != len(p.actions) + 1:
        raise InvalidPlan("states/actions length mismatch")
    for s, a, s2 in zip(p.states, p.actions, p.states[1:]):
        if not applicable(s, a) or apply(s, a) != s2:
            raise InvalidPlan(f"{a.name} does not lead between consecutive plan states")


def _reaches(children: dict[int, list[int]], src: int, dst: int) -> bool:
    stack, seen = [src], set()
    while stack:
        n = stack.pop()
        if n == dst:
            return True
        if n in seen:
            continue
        seen.add(n)
        stack.extend(children.get(n, []))
    return False
