import csv
import json

import pytest

from condtamp.cli import main
from condtamp.scenario import load_scenario


def lines(p):
    return [json.loads(x) for x in p.read_text().splitlines() if x.strip()]


def test_plan_trivial(tmp_path, capsys):
    assert main(["plan", "--scenario", "trivial", "--out", str(tmp_path)]) == 0
    assert "c* = 0.000" in capsys.readouterr().out
    assert lines(tmp_path / "incumbent.jsonl")[0]["c_star"] == 0.0


def test_plan_unsolvable(tmp_path, capsys):
    assert main(["plan", "--scenario", "unsolvable", "--out", str(tmp_path)]) == 2
    assert "UnsolvableTask" in capsys.readouterr().out
    assert lines(tmp_path / "incumbent.jsonl")[0]["reason"] == "UnsolvableTask"


def test_plan_namo_within_oracle(tmp_path, capsys):
    assert main(["plan", "--scenario", "namo_corridor", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    c = float(out.split("c* = ")[1].split()[0])
    oracle = json.loads((load_scenario("namo_corridor").path.parent / "oracle.json").read_text())
    assert c <= 1.05 * oracle["best_s"]
    for name in ("incumbent.jsonl", "engine_trace.jsonl", "graph.jsonl"):
        assert (tmp_path / name).exists()


def test_plan_task_only(tmp_path, capsys):
    assert main(["plan", "--scenario", "conditional_pick", "--task-only", "--out", str(tmp_path)]) == 0
    assert capsys.readouterr().out.split() == ["(move_base", "b_home", "b_table)", "(pick", "can", "g", "b_table",
                                               "s_table)"]


def test_seed_flag_overrides(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["plan", "--scenario", "namo_corridor", "--seed", "4", "--out", str(a)])
    eng = load_scenario("namo_corridor").engine(seed=4)
    res = eng.tmp()
    assert (a / "incumbent.jsonl").read_text() == res.to_jsonl()
    main(["plan", "--scenario", "namo_corridor", "--out", str(b)])
    assert (a / "engine_trace.jsonl").read_text() != (b / "engine_trace.jsonl").read_text()


def test_bad_input_exit_1(tmp_path, capsys):
    assert main(["plan", "--scenario", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["plan", "--scenario", str(bad), "--out", str(tmp_path)]) == 1
    assert main(["render", "--world", str(bad), "--out", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err


def test_run_obstacle(tmp_path):
    assert main(["run", "--scenario", "obstacle_appears", "--out", str(tmp_path)]) == 0
    recs = lines(tmp_path / "execution_trace.jsonl")
    assert sum(r["kind"] == "replan" for r in recs) == 1 and recs[-1]["kind"] == "success"


def test_run_blocked(tmp_path):
    assert main(["run", "--scenario", "blocked_goal", "--out", str(tmp_path)]) == 2
    assert lines(tmp_path / "execution_trace.jsonl")[-1]["reason"] == "AttemptsExhausted"


def test_bench_rows(tmp_path):
    assert main(["bench", "--scenario", "trivial", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "bench.csv").open()))
    assert len(rows) == 1 and rows[0]["scenario"] == "trivial" and rows[0]["c_star"] == "0.000000"
    assert main(["bench", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "bench.csv").read_text() == \
        "scenario,seed,c_star,wall_time_s,point_checks,segment_checks,replans\n"


def test_bench_parallel_matches_serial(tmp_path):
    args = ["bench", "--scenario", "trivial", "--scenario", "conditional_pick", "--repetitions", "2"]
    main(args + ["--out", str(tmp_path / "s")])
    main(args + ["--jobs", "2", "--out", str(tmp_path / "p")])

    def strip(p):
        return [{k: v for k, v in r.items() if k != "wall_time_s"} for r in csv.DictReader(p.open())]
    s, p = strip(tmp_path / "s" / "bench.csv"), strip(tmp_path / "p" / "bench.csv")
    assert s == p
    assert [(r["scenario"], r["seed"]) for r in s] == [("trivial", "0"), ("trivial", "1"),
                                                      ("conditional_pick", "0"), ("conditional_pick", "1")]


def test_render_empty_world(tmp_path):
    w = tmp_path / "empty.json"
    w.write_text(json.dumps({"bounds": [[0, 0], [4, 3]]}))
    assert main(["render", "--world", str(w), "--out", str(tmp_path)]) == 0
    svg = (tmp_path / "render.svg").read_text()
    shapes = [x for x in svg.splitlines() if x.strip().startswith(("<rect", "<polygon", "<circle", "<polyline", "<line"))]
    assert len(shapes) == 1 and 'id="bounds"' in shapes[0]


def test_render_corridor_with_path(tmp_path):
    main(["plan", "--scenario", "namo_corridor", "--out", str(tmp_path)])
    args = ["render", "--scenario", "namo_corridor", "--trace", str(tmp_path / "incumbent.jsonl"), "--out", str(tmp_path)]
    assert main(args) == 0
    svg = (tmp_path / "render.svg").read_bytes()
    text = svg.decode()
    assert 'id="robot"' in text and 'id="movable-box"' in text and 'id="path-0"' in text
    assert main(args) == 0
    assert (tmp_path / "render.svg").read_bytes() == svg


def test_render_execution_trace_shows_appeared(tmp_path):
    main(["run", "--scenario", "obstacle_appears", "--out", str(tmp_path)])
    assert main(["render", "--scenario", "obstacle_appears", "--trace", str(tmp_path / "execution_trace.jsonl"),
                 "--out", str(tmp_path)]) == 0
    text = (tmp_path / "render.svg").read_text()
    assert 'id="movable-crate"' in text and 'class="path"' in text


@pytest.mark.parametrize("argv", [["frobnicate"], ["plan"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as ei:
        main(argv)
    assert ei.value.code == 1
