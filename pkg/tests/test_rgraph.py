import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condtamp.ff import Plan, tp
from condtamp.pddl import applicable, apply, ground, load_domain, load_problem
from condtamp.rgraph import CycleRejected, DisconnectedPlan, InvalidPlan, RGraph, UnknownEdge
from condtamp.scenario import builtin_dir
from microtasks import compile_task, random_task


@pytest.fixture(scope="module")
def pick_task():
    scen = builtin_dir()
    d = load_domain(scen / "domain.pddl")
    return ground(d, load_problem(scen / "conditional_pick" / "problem.pddl", d))


def plan_of(task, s0, names):
    states, acts = [s0], []
    for n in names:
        a = task.action_named(n)
        acts.append(a)
        states.append(apply(states[-1], a))
    return Plan(states, acts)


def holding_state(t):
    s = t.init - t.state_of([("obj-at", "cup", "s_tray"), ("gripper-empty", "g")])
    return s | t.state_of([("holding", "g", "cup")])


def structure(g):
    st_ = {nid: n.state for nid, n in g.nodes.items()}
    return (frozenset(st_.values()),
            frozenset((st_[u], st_[v], e.action.name) for (u, v), e in g.edges.items()))


def test_linear_plan(pick_task):
    p = tp(pick_task.init, pick_task.goal_pos, (), pick_task)
    g = RGraph.build([p])
    assert len(g.nodes) == len(p) + 1 and len(g.edges) == len(p)
    assert g.nodes[g.root()].state == pick_task.init


def test_two_pick_branches_reconverge(pick_task):
    t = pick_task
    empty = tp(t.init, t.goal_pos, (), t)
    held = tp(holding_state(t), t.goal_pos, (), t)
    assert held.actions[0].schema == "place"
    g = RGraph.build([empty, held])
    assert len(g.entries) == 2
    # the two branches share the final pick edge
    pick_edges = [e for e in g.edges.values() if e.action.schema == "pick"]
    assert len(pick_edges) == 1
    # placing the cup restores the root state, so the held branch merges there
    held_entry = g.node_of(holding_state(t))
    assert g.children(held_entry) == [g.root()]
    assert g.parents(g.root()) == [held_entry]


def test_order_independent(pick_task):
    t = pick_task
    plans = [tp(t.init, t.goal_pos, (), t), tp(holding_state(t), t.goal_pos, (), t)]
    alt = plan_of(t, t.init, ["(move_base b_home b_table)", "(pick can g b_table s_table)"])
    assert structure(RGraph.build(plans + [alt])) == structure(RGraph.build([alt] + plans[::-1]))


def test_update_idempotent(pick_task):
    p = tp(pick_task.init, pick_task.goal_pos, (), pick_task)
    g = RGraph.build([p])
    before = structure(g)
    g.update(p)
    assert structure(g) == before


def test_cycle_rejected_leaves_graph(pick_task):
    t = pick_task
    main = plan_of(t, t.init, ["(move_base b_home b_table)", "(pick can g b_table s_table)"])
    g = RGraph.build([main])
    # picking the cup and putting it straight back returns to the root state
    loop = plan_of(t, t.init, ["(pick cup g b_home s_tray)", "(place cup g b_home s_tray)"])
    with pytest.raises(CycleRejected):
        g.update(loop)
    assert structure(g) == structure(RGraph.build([main]))


def test_errors(pick_task):
    t = pick_task
    p = plan_of(t, t.init, ["(move_base b_home b_table)"])
    g = RGraph.build([p])
    with pytest.raises(InvalidPlan):
        g.update(Plan([t.init, t.init], p.actions))
    with pytest.raises(DisconnectedPlan):
        g.update(plan_of(t, holding_state(t), ["(place cup g b_home s_tray)"]))
    with pytest.raises(UnknownEdge):
        g.edge(0, 99)


def test_annotate_keeps_lower(pick_task):
    p = plan_of(pick_task, pick_task.init, ["(move_base b_home b_table)"])
    g = RGraph.build([p])
    assert g.annotate(0, 1, None, 5.0)
    assert not g.annotate(0, 1, None, 7.0)
    assert g.edge(0, 1).effort_s == 5.0
    assert g.annotate(0, 1, None, 4.0) and g.edge(0, 1).effort_s == 4.0
    assert g.annotate(0, 1, None, 9.0, force=True)


def test_children_insertion_order(pick_task):
    t = pick_task
    a = plan_of(t, t.init, ["(move_base b_home b_table)", "(pick can g b_table s_table)"])
    b = plan_of(t, t.init, ["(pick cup g b_home s_tray)"])
    c = plan_of(t, t.init, ["(move_base b_home b_table)"])
    g = RGraph.build([a, b, c])
    first = g.children(g.root())
    assert [g.edge(g.root(), k).action.name for k in first] == ["(move_base b_home b_table)",
                                                                 "(pick cup g b_home s_tray)"]
    assert g.children(g.root()) == first


def test_jsonl_dump(pick_task):
    g = RGraph.build([tp(pick_task.init, pick_task.goal_pos, (), pick_task)])
    lines = [json.loads(x) for x in g.to_jsonl(pick_task).splitlines()]
    assert sum(r["type"] == "node" for r in lines) == len(g.nodes)
    assert sum(r["type"] == "edge" for r in lines) == len(g.edges)


def random_walk(task, s, rng, k):
    states, acts = [s], []
    for _ in range(k):
        app = [a for a in task.actions if applicable(states[-1], a)]
        if not app:
            break
        a = rng.choice(app)
        nxt = apply(states[-1], a)
        if nxt in states:
            break
        acts.append(a)
        states.append(nxt)
    return Plan(states, acts)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), k=st.integers(1, 6))
def test_rebuild_oracle(seed, k):
    rng = random.Random(seed)
    mt = random_task(rng, n_atoms=8, n_actions=10)
    t = compile_task(mt)
    p0 = random_walk(t, t.init, rng, 4)
    g = RGraph.build([p0])
    accepted = [p0]
    for _ in range(k):
        s = g.nodes[rng.choice(sorted(g.nodes))].state
        p = random_walk(t, s, rng, rng.randint(1, 4))
        try:
            g.update(p)
        except CycleRejected:
            continue
        accepted.append(p)
    # oracle: distinct states and distinct state pairs over the accepted plans
    states = {s for p in accepted for s in p.states}
    pairs = {(a, b) for p in accepted for a, b in zip(p.states, p.states[1:])}
    assert len(g.nodes) == len(states)
    assert {(g.nodes[u].state, g.nodes[v].state) for u, v in g.edges} == pairs
    # invariants: no duplicate states, acyclic, every edge is its action's transition
    assert len({n.state for n in g.nodes.values()}) == len(g.nodes)
    for (u, v), e in g.edges.items():
        assert apply(g.nodes[u].state, e.action) == g.nodes[v].state
        assert v in g.children(u) and u in g.parents(v)
    seen = set()

    def visit(n, stack):
        assert n not in stack
        if n in seen:
            return
        seen.add(n)
        for c in g.children(n):
            visit(c, stack | {n})
    visit(g.root(), frozenset())
