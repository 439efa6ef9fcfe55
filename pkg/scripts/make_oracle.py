#!/usr/bin/env python3
"""Freeze brute-force optimal efforts beside the corridor fixtures.

Usage: python3 scripts/make_oracle.py [--grid 0.02]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import SCENARIOS, corridor_oracle, load_world_json  # noqa: E402

FIXTURES = ["namo_corridor", "namo_corridor_slow"]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=float, default=0.02)
    args = ap.parse_args()
    for name in FIXTURES:
        sc = json.loads((SCENARIOS / name / "scenario.json").read_text())
        radius = sc.get("engine", {}).get("placement_radius", 1.5)
        res = corridor_oracle(load_world_json(name), radius, grid=args.grid)
        res["grid"] = args.grid
        (SCENARIOS / name / "oracle.json").write_text(json.dumps(res, indent=2, sort_keys=True) + "\n")
        print(f"{name}: {res['strategy']} {res['best_s']:.3f} s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
