"""2D world model for a disc-shaped mobile manipulator.

Lengths are meters, angles radians, durations seconds. Static obstacles and
object footprints are polygons; non-convex ones are triangulated at load
time. Collision queries are vectorised with numpy over sample points.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

DEFAULT_STEP = 0.01
DEFAULT_PLACEMENT_TRIES = 200
GRASP_PARALLEL_TOL = math.radians(10.0)


def wrap_angle(a: float) -> float:
    """Normalise to [-pi, pi)."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a < 0:
        a += 2.0 * math.pi
    return a - math.pi


@dataclass(frozen=True)
class Config:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError(f"non-finite configuration {self}")
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)

    def dist(self, other: "Config") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def to_list(self) -> list[float]:
        return [round(self.x, 6), round(self.y, 6), round(self.theta, 6)]

    @classmethod
    def from_list(cls, v: Sequence[float]) -> "Config":
        return cls(float(v[0]), float(v[1]), float(v[2]) if len(v) > 2 else 0.0)


# ---------------------------------------------------------------------------
# polygon helpers


def signed_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def as_ccw(poly) -> np.ndarray:
    p = np.asarray(poly, dtype=float).reshape(-1, 2)
    if len(p) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    if signed_area(p) < 0:
        p = p[::-1].copy()
    return p


def is_convex(poly: np.ndarray) -> bool:
    d = np.roll(poly, -1, axis=0) - poly
    cross = d[:, 0] * np.roll(d, -1, axis=0)[:, 1] - d[:, 1] * np.roll(d, -1, axis=0)[:, 0]
    return bool(np.all(cross >= -1e-12))


def triangulate(poly) -> list[np.ndarray]:
    """Ear clipping for a simple CCW polygon; convex input is returned whole."""
    p = as_ccw(poly)
    if is_convex(p):
        return [p]
    idx = list(range(len(p)))
    tris = []

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    guard = 0
    while len(idx) > 3 and guard < 10_000:
        guard += 1
        for k in range(len(idx)):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
            a, b, c = p[i0], p[i1], p[i2]
            if cross(a, b, c) <= 1e-12:
                continue
            if any(cross(a, b, p[j]) >= 0 and cross(b, c, p[j]) >= 0 and cross(c, a, p[j]) >= 0
                   for j in idx if j not in (i0, i1, i2)):
                continue
            tris.append(np.array([a, b, c]))
            idx.pop(k)
            break
        else:
            raise ValueError("polygon is not simple")
    tris.append(p[idx])
    return tris


def transform(poly: np.ndarray, pose: Config) -> np.ndarray:
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    rot = np.array([[c, -s], [s, c]])
    return poly @ rot.T + np.array([pose.x, pose.y])


def points_in_convex(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    a = poly
    b = np.roll(poly, -1, axis=0)
    d = b - a
    rel = points[:, None, :] - a[None, :, :]
    cross = d[None, :, 0] * rel[:, :, 1] - d[None, :, 1] * rel[:, :, 0]
    return np.all(cross >= -1e-12, axis=1)


def points_in_polygon(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Even-odd rule, any simple polygon."""
    x, y = points[:, 0:1], points[:, 1:2]
    a = poly
    b = np.roll(poly, -1, axis=0)
    cond = (a[None, :, 1] > y) != (b[None, :, 1] > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = a[None, :, 0] + (y - a[None, :, 1]) * (b[None, :, 0] - a[None, :, 0]) / (b[None, :, 1] - a[None, :, 1])
    crossings = cond & (x < xint)
    return (np.count_nonzero(crossings, axis=1) % 2) == 1


def seg_point_dist(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances (N, E) from N points to E segments a->b."""
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    dd = np.where(dd == 0, 1.0, dd)
    rel = points[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("nej,ej->ne", rel, d) / dd[None, :], 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * d[None, :, :]
    diff = points[:, None, :] - proj
    return np.sqrt(np.einsum("nej,nej->ne", diff, diff))


def convex_overlap(p: np.ndarray, q: np.ndarray, eps: float = 1e-9) -> bool:
    """Separating-axis test; touching boundaries do not count as overlap."""
    for poly in (p, q):
        d = np.roll(poly, -1, axis=0) - poly
        normals = np.stack([d[:, 1], -d[:, 0]], axis=1)
        for n in normals:
            pa = p @ n
            qa = q @ n
            if pa.max() <= qa.min() + eps or qa.max() <= pa.min() + eps:
                return False
    return True


def polygons_overlap(p_pieces: Sequence[np.ndarray], q_pieces: Sequence[np.ndarray]) -> bool:
    return any(convex_overlap(a, b) for a in p_pieces for b in q_pieces)


def centroid(poly: np.ndarray) -> np.ndarray:
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = cr.sum() / 2.0
    if abs(a) < 1e-15:
        return poly.mean(axis=0)
    return np.array([((x + xn) * cr).sum() / (6 * a), ((y + yn) * cr).sum() / (6 * a)])


# ---------------------------------------------------------------------------
# world value types


@dataclass(frozen=True)
class Collision:
    kind: str  # "static" | "movable"
    id: str
    s: float = 0.0
    segment: Optional[int] = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "id": self.id, "s": round(self.s, 6)}
        if self.segment is not None:
            d["segment"] = self.segment
        return d


@dataclass(frozen=True)
class MovableObject:
    id: str
    footprint: tuple[tuple[float, float], ...]
    pose: Config
    graspable: bool = True
    width: float = 0.0

    def __post_init__(self):
        fp = as_ccw(self.footprint)
        if abs(signed_area(fp)) < 1e-12:
            raise ValueError(f"degenerate footprint for {self.id}")
        object.__setattr__(self, "footprint", tuple(map(tuple, fp.tolist())))
        if not self.width:
            object.__setattr__(self, "width", _max_caliper(fp))

    @property
    def body(self) -> np.ndarray:
        return np.asarray(self.footprint, dtype=float)

    def polygon(self, pose: Optional[Config] = None) -> np.ndarray:
        return transform(self.body, pose or self.pose)

    def pieces(self, pose: Optional[Config] = None) -> list[np.ndarray]:
        return [transform(t, pose or self.pose) for t in _body_pieces(self.footprint)]

    def with_pose(self, pose: Config) -> "MovableObject":
        return replace(self, pose=pose)


_PIECE_CACHE: dict[tuple, list[np.ndarray]] = {}


def _body_pieces(footprint: tuple) -> list[np.ndarray]:
    hit = _PIECE_CACHE.get(footprint)
    if hit is None:
        hit = triangulate(np.asarray(footprint, dtype=float))
        _PIECE_CACHE[footprint] = hit
    return hit


def _max_caliper(poly: np.ndarray) -> float:
    # smallest width over edge directions for a convex outline (what a gripper must span)
    best = math.inf
    n = len(poly)
    for i in range(n):
        d = poly[(i + 1) % n] - poly[i]
        ln = math.hypot(*d)
        if ln == 0:
            continue
        nrm = np.array([d[1], -d[0]]) / ln
        proj = poly @ nrm
        best = min(best, float(proj.max() - proj.min()))
    return best


@dataclass(frozen=True)
class Robot:
    radius: float = 0.25
    speed_mps: float = 0.5
    ang_speed_rps: float = 1.0
    pick_time_s: float = 3.0
    place_time_s: float = 3.0
    arm_time_s: float = 2.0
    gripper_width: float = 0.35

    def surcharge(self, schema: str) -> float:
        schema = schema.lower()
        if schema == "pick":
            return self.pick_time_s
        if schema == "place":
            return self.place_time_s
        if schema == "move_arm":
            return self.arm_time_s
        return 0.0


@dataclass(frozen=True)
class Static:
    id: str
    polygon: tuple[tuple[float, float], ...]

    @cached_property
    def pieces(self) -> list[np.ndarray]:
        return triangulate(np.asarray(self.polygon, dtype=float))


@dataclass(frozen=True)
class WorldState:
    robot: Robot = field(default_factory=Robot)
    config: Config = Config(0.0, 0.0, 0.0)
    statics: tuple[Static, ...] = ()
    movables: tuple[MovableObject, ...] = ()
    surfaces: tuple[tuple[tuple[float, float], ...], ...] = ()
    anchors: tuple[tuple[str, Config], ...] = ()
    bounds: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 0.0), (10.0, 10.0))
    held: Optional[str] = None

    # -- accessors -----------------------------------------------------------
    def movable(self, oid: str) -> MovableObject:
        for m in self.movables:
            if m.id == oid:
                return m
        raise KeyError(oid)

    def has_movable(self, oid: str) -> bool:
        return any(m.id == oid for m in self.movables)

    def anchor(self, symbol: str) -> Config:
        for k, v in self.anchors:
            if k == symbol:
                return v
        raise KeyError(symbol)

    def anchor_map(self) -> dict[str, Config]:
        return dict(self.anchors)

    # -- successors ----------------------------------------------------------
    def with_config(self, c: Config) -> "WorldState":
        return replace(self, config=c)

    def with_held(self, oid: Optional[str]) -> "WorldState":
        return replace(self, held=oid)

    def with_movable(self, obj: MovableObject) -> "WorldState":
        movs = [m for m in self.movables if m.id != obj.id] + [obj]
        return replace(self, movables=tuple(sorted(movs, key=lambda m: m.id)))

    def with_movable_pose(self, oid: str, pose: Config) -> "WorldState":
        return self.with_movable(self.movable(oid).with_pose(pose))

    def with_anchor(self, symbol: str, pose: Config) -> "WorldState":
        rest = [(k, v) for k, v in self.anchors if k != symbol]
        return replace(self, anchors=tuple(sorted(rest + [(symbol, pose)])))

    def with_robot(self, robot: Robot) -> "WorldState":
        return replace(self, robot=robot)

    # -- collision machinery ---------------------------------------------------
    @cached_property
    def _checker_full(self) -> "_Checker":
        return _Checker(self, ignore_movables=False)

    @cached_property
    def _checker_static(self) -> "_Checker":
        return _Checker(self, ignore_movables=True)

    def checker(self, ignore_movables: bool = False) -> "_Checker":
        return self._checker_static if ignore_movables else self._checker_full

    def obstacle_pieces(self, exclude: Iterable[str] = ()) -> list[tuple[str, str, np.ndarray]]:
        exclude = set(exclude)
        out = [("static", s.id, p) for s in self.statics for p in s.pieces]
        for m in self.movables:
            if m.id == self.held or m.id in exclude:
                continue
            out.extend(("movable", m.id, p) for p in m.pieces())
        return out

    def footprint_clear(self, obj: MovableObject, pose: Config) -> bool:
        pieces = obj.pieces(pose)
        others = [p for kind, oid, p in self.obstacle_pieces(exclude=[obj.id])]
        if polygons_overlap(pieces, others):
            return False
        (xmin, ymin), (xmax, ymax) = self.bounds
        poly = obj.polygon(pose)
        return bool(poly[:, 0].min() >= xmin and poly[:, 0].max() <= xmax
                    and poly[:, 1].min() >= ymin and poly[:, 1].max() <= ymax)


class _Checker:
    """Vectorised disc (+ held polygon) collision test against one world."""

    def __init__(self, w: WorldState, ignore_movables: bool):
        self.w = w
        self.r = w.robot.radius
        pieces = [(k, i, p) for k, i, p in w.obstacle_pieces() if not (ignore_movables and k == "movable")]
        self.labels = [(k, i) for k, i, _ in pieces]
        self.n_pieces = len(pieces)
        if pieces:
            self.a = np.concatenate([p for _, _, p in pieces])
            self.b = np.concatenate([np.roll(p, -1, axis=0) for _, _, p in pieces])
            counts = [len(p) for _, _, p in pieces]
            self.starts = np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(int)
        (self.xmin, self.ymin), (self.xmax, self.ymax) = w.bounds
        self.held_body = None
        if w.held is not None and w.has_movable(w.held):
            obj = w.movable(w.held)
            body = obj.body
            if np.max(np.hypot(body[:, 0], body[:, 1])) > self.r:
                self.held_body = _sample_boundary(body, 0.01)

    def first_hits(self, pts: np.ndarray, thetas: Optional[np.ndarray] = None) -> list[Optional[tuple[str, str]]]:
        """Per sample, the first obstacle hit (statics before movables) or None."""
        out: list[Optional[tuple[str, str]]] = [None] * len(pts)
        r = self.r
        oob = ((pts[:, 0] - r < self.xmin - 1e-12) | (pts[:, 0] + r > self.xmax + 1e-12)
               | (pts[:, 1] - r < self.ymin - 1e-12) | (pts[:, 1] + r > self.ymax + 1e-12))
        hit = None
        if self.n_pieces:
            d = self.b - self.a
            rel = pts[:, None, :] - self.a[None, :, :]
            cross = d[None, :, 0] * rel[:, :, 1] - d[None, :, 1] * rel[:, :, 0]
            inside = np.logical_and.reduceat(cross >= -1e-12, self.starts, axis=1)
            dist = seg_point_dist(pts, self.a, self.b)
            near = np.minimum.reduceat(dist, self.starts, axis=1) < r - 1e-12
            hit = inside | near
            if self.held_body is not None:
                th = thetas if thetas is not None else np.zeros(len(pts))
                for n in range(len(pts)):
                    if hit[n].any():
                        continue
                    c, s = math.cos(th[n]), math.sin(th[n])
                    bpts = self.held_body @ np.array([[c, s], [-s, c]]) + pts[n]
                    rel2 = bpts[:, None, :] - self.a[None, :, :]
                    cr2 = d[None, :, 0] * rel2[:, :, 1] - d[None, :, 1] * rel2[:, :, 0]
                    ins2 = np.logical_and.reduceat(cr2 > 1e-9, self.starts, axis=1)
                    hit[n] |= ins2.any(axis=0)
        for n in range(len(pts)):
            if hit is not None and hit[n].any():
                k = int(np.argmax(hit[n]))
                if oob[n] and self.labels[k][0] != "static":
                    out[n] = ("static", "bounds")
                else:
                    out[n] = self.labels[k]
            elif oob[n]:
                out[n] = ("static", "bounds")
        return out


def _sample_boundary(poly: np.ndarray, step: float) -> np.ndarray:
    pts = []
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        k = max(1, int(math.ceil(np.linalg.norm(b - a) / step)))
        for j in range(k):
            pts.append(a + (b - a) * j / k)
    return np.asarray(pts)


# ---------------------------------------------------------------------------
# queries


class CheckCounter:
    """Collision-check instrumentation for one planning episode."""

    def __init__(self):
        self.point_checks = 0
        self.segment_checks = 0
        self.sweep_length = 0.0

    def reset(self):
        self.point_checks = 0
        self.segment_checks = 0
        self.sweep_length = 0.0

    def snapshot(self) -> dict:
        return {"point_checks": self.point_checks, "segment_checks": self.segment_checks,
                "sweep_length": round(self.sweep_length, 6)}

    def add(self, other: "CheckCounter"):
        self.point_checks += other.point_checks
        self.segment_checks += other.segment_checks
        self.sweep_length += other.sweep_length


def collision_free(c: Config, w: WorldState, *, ignore_movables: bool = False,
                   counter: Optional[CheckCounter] = None) -> Optional[Collision]:
    """None when the robot (and anything it holds) is clear at ``c``."""
    if counter is not None:
        counter.point_checks += 1
    hit = w.checker(ignore_movables).first_hits(np.array([[c.x, c.y]]), np.array([c.theta]))[0]
    return None if hit is None else Collision(hit[0], hit[1])


def segment_status(c1: Config, c2: Config, w: WorldState, step: float = DEFAULT_STEP, *,
                   ignore_movables: bool = False, counter: Optional[CheckCounter] = None,
                   ignore: Iterable[str] = ()) -> Optional[Collision]:
    """Sweep the straight segment c1->c2; earliest hit with its fraction ``s``."""
    if step <= 0:
        raise ValueError("step must be positive")
    length = c1.dist(c2)
    if counter is not None:
        counter.segment_checks += 1
        counter.sweep_length += length
    n = max(1, int(math.ceil(length / step)))
    s = np.linspace(0.0, 1.0, n + 1)
    pts = np.stack([c1.x + (c2.x - c1.x) * s, c1.y + (c2.y - c1.y) * s], axis=1)
    dth = wrap_angle(c2.theta - c1.theta)
    thetas = c1.theta + dth * s
    ignore = set(ignore)
    w_eff = w
    if ignore:
        w_eff = replace(w, movables=tuple(m for m in w.movables if m.id not in ignore or m.id == w.held))
    hits = w_eff.checker(ignore_movables).first_hits(pts, thetas)
    for k, h in enumerate(hits):
        if h is not None:
            return Collision(h[0], h[1], float(s[k]))
    return None


def find_grasps(o: MovableObject, gripper_width: float, clearance: float = 0.30) -> list[Config]:
    """Antipodal two-finger grasps of a planar footprint.

    Pairs of near-parallel, opposite-facing edges no further apart than the
    gripper opening. Each grasp axis admits two approach directions (along
    the edges); the returned configs stand ``clearance`` beyond the object's
    extent in that direction, facing it.
    """
    if not o.graspable:
        raise ValueError(f"object {o.id} is not graspable")
    poly = o.body
    c = centroid(poly)
    n = len(poly)
    edges = []
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        d = b - a
        ln = float(np.hypot(*d))
        if ln < 1e-12:
            continue
        d = d / ln
        edges.append((a, b, d, np.array([d[1], -d[0]])))
    approaches: list[tuple[float, float]] = []
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            ai, bi, di, ni = edges[i]
            aj, bj, dj, nj = edges[j]
            cosang = float(np.clip(np.dot(ni, -nj), -1.0, 1.0))
            if math.acos(cosang) >= GRASP_PARALLEL_TOL:
                continue
            mid_i, mid_j = (ai + bi) / 2, (aj + bj) / 2
            sep = abs(float(np.dot(mid_j - mid_i, ni)))
            if sep > gripper_width + 1e-12:
                continue
            pi = sorted([float(np.dot(ai, di)), float(np.dot(bi, di))])
            pj = sorted([float(np.dot(aj, di)), float(np.dot(bj, di))])
            if min(pi[1], pj[1]) - max(pi[0], pj[0]) <= 1e-9:
                continue
            for u in (di, -di):
                ang = round(math.atan2(u[1], u[0]), 9)
                if all(abs(wrap_angle(ang - a0)) > 1e-6 for a0, _ in approaches):
                    approaches.append((ang, 0.0))
    out = []
    for ang, _ in sorted(approaches):
        u = np.array([math.cos(ang), math.sin(ang)])
        extent = float(np.max((poly - c) @ (-u)))
        pos = c - u * (extent + clearance)
        body_cfg = Config(float(pos[0]), float(pos[1]), ang)
        out.append(_compose(o.pose, body_cfg))
    return out


def _compose(pose: Config, local: Config) -> Config:
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return Config(pose.x + c * local.x - s * local.y, pose.y + s * local.x + c * local.y,
                  pose.theta + local.theta)


def sample_placement(o: MovableObject, w: WorldState, rng: np.random.Generator,
                     radius: float = 1.0, tries: int = DEFAULT_PLACEMENT_TRIES) -> Optional[Config]:
    """Rejection-sample a pose for ``o`` on a surface near its current pose.

    The object's heading is kept. Centres are drawn from the part of each
    surface's bounding box that can hold the footprint, within ``radius``.
    Returns None (exhausted) after ``tries`` rejected samples.
    """
    surfaces = [as_ccw(s) for s in w.surfaces]
    if not surfaces:
        return None
    rel = o.polygon(Config(0.0, 0.0, o.pose.theta))
    boxes = []
    for s in surfaces:
        lo = np.maximum(s.min(axis=0) - rel.min(axis=0), [o.pose.x - radius, o.pose.y - radius])
        hi = np.minimum(s.max(axis=0) - rel.max(axis=0), [o.pose.x + radius, o.pose.y + radius])
        if np.all(hi >= lo):
            boxes.append((s, lo, hi))
    if not boxes:
        return None
    areas = np.array([max(float(np.prod(hi - lo)), 1e-12) for _, lo, hi in boxes])
    for _ in range(tries):
        s, lo, hi = boxes[int(rng.choice(len(boxes), p=areas / areas.sum()))]
        if float(np.prod(hi - lo)) <= math.pi * radius * radius:
            p = lo + rng.random(2) * (hi - lo)
            if math.hypot(p[0] - o.pose.x, p[1] - o.pose.y) > radius:
                continue
        else:
            # the disc is the smaller region: draw from it, reject outside the box
            r, a = radius * math.sqrt(rng.random()), rng.uniform(-math.pi, math.pi)
            p = np.array([o.pose.x + r * math.cos(a), o.pose.y + r * math.sin(a)])
            if np.any(p < lo) or np.any(p > hi):
                continue
        pose = Config(float(p[0]), float(p[1]), o.pose.theta)
        if not points_in_polygon(o.polygon(pose), s).all():
            continue
        if w.footprint_clear(o, pose):
            return pose
    return None


def sample_free_pose(w: WorldState, rng: np.random.Generator, tries: int = 1000) -> Optional[Config]:
    (xmin, ymin), (xmax, ymax) = w.bounds
    for _ in range(tries):
        x, y = xmin + rng.random() * (xmax - xmin), ymin + rng.random() * (ymax - ymin)
        c = Config(float(x), float(y), float(rng.uniform(-math.pi, math.pi)))
        if collision_free(c, w) is None:
            return c
    return None


# ---------------------------------------------------------------------------
# motion paths and effort


@dataclass
class MotionPath:
    action: str
    waypoints: list[tuple[float, Config]]
    validated: str = "lazy"  # lazy | valid | invalid
    collision: Optional[Collision] = None

    @property
    def effort_s(self) -> float:
        if not self.waypoints:
            return 0.0
        return self.waypoints[-1][0] - self.waypoints[0][0]

    @property
    def configs(self) -> list[Config]:
        return [c for _, c in self.waypoints]

    @property
    def length(self) -> float:
        cs = self.configs
        return sum(a.dist(b) for a, b in zip(cs, cs[1:]))

    def shifted(self, dt: float) -> "MotionPath":
        return MotionPath(self.action, [(t + dt, c) for t, c in self.waypoints], self.validated, self.collision)

    def to_dict(self) -> dict:
        d = {"action": self.action, "validated": self.validated, "effort_s": round(self.effort_s, 6),
             "waypoints": [[round(t, 6)] + c.to_list() for t, c in self.waypoints]}
        if self.collision is not None:
            d["collision"] = self.collision.to_dict()
        return d


def time_parameterize(configs: Sequence[Config], robot: Robot, surcharge: float = 0.0,
                      t0: float = 0.0, action: str = "") -> MotionPath:
    """Turn-then-drive timing: rotate in place to each segment heading,
    translate, rotate to the final heading, then dwell for ``surcharge``."""
    if not configs:
        raise ValueError("empty path")
    t = t0
    cur = configs[0]
    wps = [(t, cur)]
    for nxt in configs[1:]:
        d = cur.dist(nxt)
        if d > 1e-12:
            heading = math.atan2(nxt.y - cur.y, nxt.x - cur.x)
            dth = abs(wrap_angle(heading - cur.theta))
            if dth > 1e-12:
                t += dth / robot.ang_speed_rps
                cur = Config(cur.x, cur.y, heading)
                wps.append((t, cur))
            t += d / robot.speed_mps
            cur = Config(nxt.x, nxt.y, heading)
            wps.append((t, cur))
    final = configs[-1]
    dth = abs(wrap_angle(final.theta - cur.theta))
    if dth > 1e-12:
        t += dth / robot.ang_speed_rps
        cur = Config(cur.x, cur.y, final.theta)
        wps.append((t, cur))
    if surcharge > 0:
        wps.append((t + surcharge, cur))
    return MotionPath(action, wps)


def effort(path: MotionPath, action_schema: str, robot: Robot) -> float:
    """Execution time: translation + rotation (summed) + action surcharge."""
    cs = path.configs
    trans = sum(a.dist(b) for a, b in zip(cs, cs[1:]))
    rot = sum(abs(wrap_angle(b.theta - a.theta)) for a, b in zip(cs, cs[1:]))
    return trans / robot.speed_mps + rot / robot.ang_speed_rps + robot.surcharge(action_schema)


# ---------------------------------------------------------------------------
# world file


def _parse_anchor(v) -> Config:
    if isinstance(v, dict):
        if "pose" in v:
            return Config.from_list(v["pose"])
        if "region" in v:
            c = centroid(as_ccw(v["region"]))
            return Config(float(c[0]), float(c[1]), float(v.get("theta", 0.0)))
        raise ValueError(f"bad anchor {v!r}")
    return Config.from_list(v)


def world_from_dict(doc: dict) -> WorldState:
    r = doc.get("robot", {})
    robot = Robot(
        radius=float(r.get("radius", 0.25)),
        speed_mps=float(r.get("speed_mps", 0.5)),
        ang_speed_rps=float(r.get("ang_speed_rps", 1.0)),
        pick_time_s=float(r.get("pick_time_s", 3.0)),
        place_time_s=float(r.get("place_time_s", 3.0)),
        arm_time_s=float(r.get("arm_time_s", 2.0)),
        gripper_width=float(r.get("gripper_width", 0.35)),
    )
    statics = []
    for i, s in enumerate(doc.get("statics", [])):
        if isinstance(s, dict):
            statics.append(Static(str(s.get("id", f"static{i}")), tuple(map(tuple, s["polygon"]))))
        else:
            statics.append(Static(f"static{i}", tuple(map(tuple, s))))
    movables = tuple(sorted((movable_from_dict(m) for m in doc.get("movables", [])), key=lambda m: m.id))
    ids = [m.id for m in movables]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate movable ids")
    bounds = doc.get("bounds", [[0, 0], [10, 10]])
    return WorldState(
        robot=robot,
        config=Config.from_list(r.get("pose", [0, 0, 0])),
        statics=tuple(statics),
        movables=movables,
        surfaces=tuple(tuple(map(tuple, s)) for s in doc.get("surfaces", [])),
        anchors=tuple(sorted((k, _parse_anchor(v)) for k, v in doc.get("anchors", {}).items())),
        bounds=((float(bounds[0][0]), float(bounds[0][1])), (float(bounds[1][0]), float(bounds[1][1]))),
        held=doc.get("held"),
    )


def movable_from_dict(m: dict) -> MovableObject:
    return MovableObject(
        id=str(m["id"]),
        footprint=tuple(map(tuple, m["footprint"])),
        pose=Config.from_list(m.get("pose", [0, 0, 0])),
        graspable=bool(m.get("graspable", True)),
        width=float(m.get("width", 0.0)),
    )


def movable_to_dict(m: MovableObject) -> dict:
    return {"id": m.id, "footprint": [list(p) for p in m.footprint], "pose": m.pose.to_list(),
            "graspable": m.graspable, "width": round(m.width, 6)}


def load_world(path) -> WorldState:
    with open(path, encoding="utf-8") as fh:
        return world_from_dict(json.load(fh))
