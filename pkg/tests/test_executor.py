import pytest

from condtamp.executor import EventTimeline, ExecConfig, dispatch, execute, interpolate, revalidate, split
from condtamp.scenario import load_scenario
from condtamp.world import Config, MotionPath, time_parameterize


def run(name, seed=None, timeline=None, cfg=None):
    sc = load_scenario(name)
    eng = sc.engine(seed=seed)
    res = eng.tmp()
    tr = execute(eng, sc.timeline if timeline is None else timeline, cfg or sc.exec_cfg, condition=sc.condition)
    return sc, eng, res, tr


def kinds(tr):
    return [e["kind"] for e in tr.entries]


def test_timeline_validation():
    with pytest.raises(ValueError):
        EventTimeline.from_list([{"kind": "ObjectMoved", "at": 3.0, "id": "a", "pose": [0, 0, 0]},
                                 {"kind": "ObjectMoved", "at": 1.0, "id": "a", "pose": [0, 0, 0]}])
    obj = {"id": "x", "footprint": [[0, 0], [0.1, 0], [0.1, 0.1]], "pose": [1, 1, 0]}
    with pytest.raises(ValueError):
        EventTimeline.from_list([{"kind": "ObstacleAppears", "at": 1.0, "object": obj},
                                 {"kind": "ObstacleAppears", "at": 2.0, "object": obj}])
    with pytest.raises(ValueError):
        EventTimeline.from_list([{"kind": "Earthquake", "at": 1.0}])
    with pytest.raises(ValueError):
        EventTimeline.from_list([{"kind": "ObjectMoved", "id": "a", "pose": [0, 0, 0]}])


def test_interpolate_and_split():
    p = time_parameterize([Config(0, 0, 0), Config(2, 0, 0)], load_scenario("trivial").world.robot)
    mid = interpolate(p, p.effort_s / 2)
    assert mid.x == pytest.approx(1.0) and mid.y == pytest.approx(0.0)
    head, tail = split(p, p.effort_s / 2)
    assert head.effort_s + tail.effort_s == pytest.approx(p.effort_s)
    assert head.configs[-1].dist(tail.configs[0]) < 1e-9


def test_empty_timeline_replays_incumbent():
    sc, eng, res, tr = run("namo_corridor", timeline=EventTimeline())
    assert tr.outcome == "Success" and tr.replans == 0 and tr.gate_ok
    assert tr.effort_s == pytest.approx(res.c_star)
    done = [e["action"] for e in tr.entries if e["kind"] == "action_finished"]
    assert done == res.actions


def test_obstacle_appears_single_replan():
    sc, eng, res, tr = run("obstacle_appears")
    assert tr.outcome == "Success" and tr.gate_ok
    assert tr.count("replan") == 1
    assert "halt" in kinds(tr)


def test_far_obstacle_is_no_op():
    far = {"kind": "ObstacleAppears", "at": 1.0,
           "object": {"id": "pebble", "footprint": [[-0.05, -0.05], [0.05, -0.05], [0.05, 0.05], [-0.05, 0.05]],
                      "pose": [9.6, 0.4, 0.0]}}
    sc, eng, res, tr = run("obstacle_appears", timeline=EventTimeline.from_list([far]))
    assert tr.outcome == "Success" and tr.count("replan") == 0
    assert tr.effort_s == pytest.approx(res.c_star)


def test_pick_failure_bypass():
    sc, eng, res, tr = run("pick_failure")
    assert tr.outcome == "Success" and tr.gate_ok
    assert tr.count("action_failed") == 1 and tr.count("replan") == 1
    failed = next(e for e in tr.entries if e["kind"] == "action_failed")
    later = [e["action"] for e in tr.entries if e["kind"] == "action_finished" and e["seq"] > failed["seq"]]
    assert any(a.startswith("(pick can") for a in later)
    assert failed["action"] not in later


@pytest.mark.parametrize("name,first", [("conditional_pick", "(move_base"), ("conditional_pick_holding", "(place cup")])
def test_conditional_dispatch(name, first):
    sc, eng, res, tr = run(name)
    assert tr.outcome == "Success" and tr.count("replan") == 0
    done = [e["action"] for e in tr.entries if e["kind"] == "action_finished"]
    assert done[0].startswith(first) and done[-1].startswith("(pick can")
    if sc.condition:
        assert tr.entries[0]["kind"] == "branch_chosen"


def test_dispatch_single_child():
    sc = load_scenario("namo_corridor")
    eng = sc.engine()
    inc = eng.tmp()
    g = eng.graph
    n = g.root()
    assert dispatch(eng, n, g.nodes[n].state, inc) == inc.plan[1]


def test_blocked_goal_exhausts_attempts():
    sc, eng, res, tr = run("blocked_goal")
    assert tr.outcome == "Failure" and tr.reason == "AttemptsExhausted"
    assert tr.replans == sc.exec_cfg.max_attempts == tr.count("replan")


def test_object_moved_out_of_the_way():
    # the crate shows up on the lane, then is moved aside before the robot gets there
    ev = [{"kind": "ObstacleAppears", "at": 0.5,
           "object": {"id": "crate", "footprint": [[-0.15, -0.15], [0.15, -0.15], [0.15, 0.15], [-0.15, 0.15]],
                      "pose": [5.0, 2.5, 0.0], "graspable": True}},
          {"kind": "ObjectMoved", "at": 1.0, "id": "crate", "pose": [9.6, 0.4, 0.0]}]
    sc, eng, res, tr = run("obstacle_appears", timeline=EventTimeline.from_list(ev))
    assert tr.outcome == "Success" and tr.gate_ok


def test_gate_detects_tampered_segment():
    sc, eng, res, tr = run("namo_corridor", timeline=EventTimeline())
    assert revalidate(eng, tr)
    path, w = tr.segments[0]
    # drive straight through the box instead
    bad = time_parameterize([w.anchor("start"), w.anchor("goal")], w.robot)
    tr.segments[0] = (MotionPath(path.action, bad.waypoints), w)
    assert not revalidate(eng, tr)


def test_trace_records_are_versioned():
    _, _, _, tr = run("obstacle_appears")
    assert all(e["v"] == 1 for e in tr.entries)
    assert [e["seq"] for e in tr.entries] == list(range(len(tr.entries)))
    assert tr.entries[-1]["kind"] == "success"


def test_exec_config_bound():
    sc, eng, res, tr = run("blocked_goal", cfg=ExecConfig(max_attempts=1))
    assert tr.outcome == "Failure" and tr.replans == 1
