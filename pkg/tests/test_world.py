import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import Point, Polygon

from condtamp.world import (CheckCounter, Config, MotionPath, MovableObject, Robot, WorldState, collision_free,
                            effort, find_grasps, sample_free_pose, sample_placement, segment_status,
                            time_parameterize, world_from_dict)
from condtamp.scenario import load_scenario
from oracles import Raster

WALLS = [
    [[2, 2], [3, 2], [3, 6], [2, 6]],
    [[5, 1], [8, 1], [7, 3], [6, 3.5]],
    [[4, 7], [6, 8], [4.5, 9]],
]


def sq(half):
    return ((-half, -half), (half, -half), (half, half), (-half, half))


@pytest.fixture(scope="module")
def walls():
    return world_from_dict({"bounds": [[0, 0], [10, 10]], "statics": WALLS, "robot": {"radius": 0.25}})


def test_empty_world_clear():
    w = WorldState()
    rng = np.random.default_rng(0)
    for _ in range(100):
        x, y = rng.uniform(0.3, 9.7, 2)
        assert collision_free(Config(x, y, 0.0), w) is None


def test_inside_wall(walls):
    hit = collision_free(Config(2.5, 4.0, 0.0), walls)
    assert hit is not None and hit.kind == "static"


def test_raster_agreement(walls):
    raster = Raster(WALLS, walls.bounds, cell=0.01)
    shapes = [Polygon(p) for p in WALLS]
    rng = np.random.default_rng(1)
    r = walls.robot.radius
    checked = 0
    for _ in range(1000):
        x, y = rng.uniform(0, 10, 2)
        # the 1 cm raster cannot resolve a band of one cell around the contact distance
        d = min(s.distance(Point(x, y)) for s in shapes)
        edge = min(x, y, 10 - x, 10 - y)
        if abs(d - r) < 0.015 or abs(edge - r) < 0.015:
            continue
        checked += 1
        assert (collision_free(Config(x, y, 0.0), walls) is not None) == raster.disc_hits(x, y, r), (x, y)
    assert checked > 900


def test_segment_degenerate(walls):
    c = Config(1.0, 1.0, 0.3)
    assert segment_status(c, c, walls) is None


def test_segment_hits_new_obstacle():
    sc = load_scenario("obstacle_appears")
    crate = sc.timeline.events[0].obj
    w = sc.world.with_movable(crate)
    start, target = sc.world.anchor("b_start"), sc.world.anchor("b_can")
    assert segment_status(start, target, sc.world) is None
    hit = segment_status(start, target, w)
    assert hit is not None and hit.kind == "movable" and hit.id == "crate"
    assert 0.0 < hit.s < 1.0


def test_segment_refinement_agreement(walls):
    rng = np.random.default_rng(2)
    for _ in range(200):
        a = Config(*rng.uniform(0.3, 9.7, 2), 0.0)
        b = Config(*rng.uniform(0.3, 9.7, 2), 0.0)
        coarse = segment_status(a, b, walls, step=0.01)
        fine = segment_status(a, b, walls, step=0.001)
        assert (coarse is None) == (fine is None)
        if coarse is not None:
            assert coarse.id == fine.id
            assert abs(coarse.s - fine.s) * a.dist(b) <= 0.011


def test_counter_monotone(walls):
    cnt = CheckCounter()
    assert cnt.snapshot()["point_checks"] == 0 and cnt.snapshot()["segment_checks"] == 0
    last = (0, 0)
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = Config(*rng.uniform(0.3, 9.7, 2), 0.0)
        collision_free(a, walls, counter=cnt)
        segment_status(a, Config(5, 5, 0), walls, counter=cnt)
        now = (cnt.point_checks, cnt.segment_checks)
        assert now[0] > last[0] and now[1] > last[1]
        last = now


def test_grasps_small_square():
    o = MovableObject("b", sq(0.05), Config(1.0, 1.0, 0.0))
    gs = find_grasps(o, 0.15)
    assert len(gs) == 4
    headings = sorted(round(math.degrees(g.theta)) % 360 for g in gs)
    assert headings == [0, 90, 180, 270]
    for g in gs:
        # each approach faces the object centre from 0.05 + clearance away
        assert math.isclose(math.hypot(g.x - 1.0, g.y - 1.0), 0.35, abs_tol=1e-9)


def test_grasps_disc_too_wide():
    poly = tuple((0.2 * math.cos(2 * math.pi * k / 16), 0.2 * math.sin(2 * math.pi * k / 16)) for k in range(16))
    assert find_grasps(MovableObject("d", poly, Config(0, 0, 0)), 0.3) == []


def test_grasps_not_graspable():
    with pytest.raises(ValueError):
        find_grasps(MovableObject("r", sq(0.1), Config(0, 0, 0), graspable=False), 0.35)


def test_placement_single_surface():
    w = WorldState(surfaces=(((0, 0), (10, 0), (10, 10), (0, 10)),))
    o = MovableObject("b", sq(0.1), Config(5, 5, 0))
    p = sample_placement(o, w, np.random.default_rng(0), radius=2.0, tries=1)
    assert p is not None and math.hypot(p.x - 5, p.y - 5) <= 2.0


def test_placement_exhausted():
    surf = ((4, 4), (6, 4), (6, 6), (4, 6))
    w = WorldState(surfaces=(surf,), statics=(), movables=(MovableObject("big", sq(1.0), Config(5, 5, 0)),))
    o = MovableObject("b", sq(0.1), Config(5, 5, 0))
    assert sample_placement(o, w, np.random.default_rng(0), radius=1.5, tries=200) is None


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_placement_passes_recheck(seed):
    sc = load_scenario("namo_corridor")
    w = sc.world
    o = w.movable("box")
    p = sample_placement(o, w, np.random.default_rng(seed), radius=1.5)
    if p is not None:
        assert w.footprint_clear(o, p)
        assert math.hypot(p.x - o.pose.x, p.y - o.pose.y) <= 1.5 + 1e-9


def test_free_pose_empty_and_full(walls):
    c = sample_free_pose(WorldState(), np.random.default_rng(0), tries=1)
    assert c is not None
    full = world_from_dict({"bounds": [[0, 0], [1, 1]], "statics": [[[0, 0], [1, 0], [1, 1], [0, 1]]]})
    assert sample_free_pose(full, np.random.default_rng(0), tries=50) is None


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_free_pose_recheck(seed):
    w = world_from_dict({"bounds": [[0, 0], [10, 10]], "statics": WALLS})
    c = sample_free_pose(w, np.random.default_rng(seed))
    assert c is not None and collision_free(c, w) is None


def test_effort_straight():
    robot = Robot(speed_mps=0.5)
    p = time_parameterize([Config(0, 0, 0), Config(2, 0, 0)], robot, action="move_base")
    assert p.effort_s == pytest.approx(4.0)
    assert effort(p, "move_base", robot) == pytest.approx(4.0)


def test_effort_pick_zero_length():
    robot = Robot(pick_time_s=3.0)
    p = time_parameterize([Config(1, 1, 0)], robot, surcharge=robot.surcharge("pick"), action="pick")
    assert p.effort_s == pytest.approx(3.0)
    assert effort(MotionPath("pick", [(0.0, Config(1, 1, 0))]), "pick", robot) == pytest.approx(3.0)


@settings(max_examples=50, deadline=None)
@given(pts=st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(-3.1, 3.1)), min_size=3, max_size=7))
def test_effort_additive(pts):
    robot = Robot()
    cs = [Config(x, y, th) for x, y, th in pts]
    k = len(cs) // 2
    whole = MotionPath("move_base", [(float(i), c) for i, c in enumerate(cs)])
    a = MotionPath("move_base", [(float(i), c) for i, c in enumerate(cs[:k + 1])])
    b = MotionPath("move_base", [(float(i), c) for i, c in enumerate(cs[k:])])
    assert effort(whole, "move_base", robot) == pytest.approx(
        effort(a, "move_base", robot) + effort(b, "move_base", robot), abs=1e-9)
    # timed paths: concatenating shifted legs adds their durations
    ta = time_parameterize(cs[:k + 1], robot)
    tb = time_parameterize([ta.configs[-1]] + cs[k + 1:], robot)
    joined = MotionPath("move_base", ta.waypoints + tb.shifted(ta.waypoints[-1][0]).waypoints[1:])
    assert joined.effort_s == pytest.approx(ta.effort_s + tb.effort_s, abs=1e-9)
