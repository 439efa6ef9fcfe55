"""Deterministic SVG drawings of a world and any waypoints found in a JSONL file."""

from __future__ import annotations

import json
import math
from typing import Iterable, Optional

from .world import MovableObject, WorldState, movable_from_dict

SCALE = 80.0  # px per metre
MARGIN = 20.0


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def overlay_from_jsonl(text: str) -> tuple[list[list[tuple[float, float]]], list[MovableObject]]:
    """Polylines from every ``waypoints`` list, plus objects that appeared mid-run."""
    out, appeared = [], {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {n}: {exc.msg}") from exc
        wps = rec.get("waypoints") if isinstance(rec, dict) else None
        if wps:
            out.append([(float(w[1]), float(w[2])) for w in wps])
        ev = rec.get("event") if isinstance(rec, dict) else None
        if isinstance(ev, dict) and ev.get("kind") == "ObstacleAppears" and "object" in ev:
            m = movable_from_dict(ev["object"])
            appeared[m.id] = m
    return out, [appeared[k] for k in sorted(appeared)]


def render_svg(w: WorldState, paths: Iterable[list[tuple[float, float]]] = (), *,
               extra_movables: Optional[Iterable[MovableObject]] = None, show_robot: bool = True) -> str:
    (xmin, ymin), (xmax, ymax) = w.bounds
    width = (xmax - xmin) * SCALE + 2 * MARGIN
    height = (ymax - ymin) * SCALE + 2 * MARGIN

    def X(x):
        return MARGIN + (x - xmin) * SCALE

    def Y(y):
        return MARGIN + (ymax - y) * SCALE

    def poly(points, cls, ident):
        pts = " ".join(f"{_f(X(x))},{_f(Y(y))}" for x, y in points)
        return f'  <polygon id="{ident}" class="{cls}" points="{pts}"/>'

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
           f'viewBox="0 0 {_f(width)} {_f(height)}">',
           "  <style>.bounds{fill:none;stroke:#000;stroke-width:2}.static{fill:#555}"
           ".surface{fill:#cde;stroke:#89a}.movable{fill:#d84;stroke:#a52}"
           ".robot{fill:#4a8;fill-opacity:.6;stroke:#264}.path{fill:none;stroke:#24c;stroke-width:2}"
           ".anchor{fill:#24c}</style>",
           f'  <rect id="bounds" class="bounds" x="{_f(X(xmin))}" y="{_f(Y(ymax))}" '
           f'width="{_f((xmax - xmin) * SCALE)}" height="{_f((ymax - ymin) * SCALE)}"/>']
    for i, s in enumerate(w.surfaces):
        out.append(poly(s, "surface", f"surface-{i}"))
    for s in w.statics:
        out.append(poly(s.polygon, "static", f"static-{s.id}"))
    movs = list(w.movables) + [m for m in extra_movables or () if not w.has_movable(m.id)]
    for m in sorted(movs, key=lambda m: m.id):
        out.append(poly([tuple(p) for p in m.polygon()], "movable", f"movable-{m.id}"))
    for name, c in w.anchors:
        out.append(f'  <circle id="anchor-{name}" class="anchor" cx="{_f(X(c.x))}" cy="{_f(Y(c.y))}" r="2"/>')
    for k, pl in enumerate(paths):
        if len(pl) < 2:
            continue
        pts = " ".join(f"{_f(X(x))},{_f(Y(y))}" for x, y in pl)
        out.append(f'  <polyline id="path-{k}" class="path" points="{pts}"/>')
    if show_robot:
        c = w.config
        r = w.robot.radius * SCALE
        out.append(f'  <circle id="robot" class="robot" cx="{_f(X(c.x))}" cy="{_f(Y(c.y))}" r="{_f(r)}"/>')
        hx, hy = X(c.x + w.robot.radius * math.cos(c.theta)), Y(c.y + w.robot.radius * math.sin(c.theta))
        out.append(f'  <line id="robot-heading" x1="{_f(X(c.x))}" y1="{_f(Y(c.y))}" x2="{_f(hx)}" y2="{_f(hy)}" '
                   'stroke="#000"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
