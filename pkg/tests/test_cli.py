import json
import subprocess
import sys

import pytest

from mgbary.cli import main

TRIANGLE = {
    "vertices": ["A", "B", "C"],
    "edges": [
        {"id": "e_AB", "u": "A", "v": "B", "length": 1.0},
        {"id": "e_AC", "u": "A", "v": "C", "length": 1.0},
        {"id": "e_BC", "u": "B", "v": "C", "length": 1.0},
    ],
}

TRIPOD = {
    "vertices": ["o", "t1", "t2", "t3"],
    "edges": [
        {"id": "b1", "u": "o", "v": "t1", "length": 1.0},
        {"id": "b2", "u": "o", "v": "t2", "length": 1.0},
        {"id": "b3", "u": "o", "v": "t3", "length": 1.0},
    ],
}


def tripod_problem(grid=0.0625):
    return {
        "graph": TRIPOD,
        "measures": [
            {
                "weight": 1 / 3,
                "measure": {
                    "atoms": [],
                    "pieces": [{"edge": f"b{i}", "a": 0.5, "b": 1.0, "density": 2.0}],
                },
            }
            for i in (1, 2, 3)
        ],
        "grid": grid,
    }


@pytest.fixture
def triangle_path(tmp_path):
    p = tmp_path / "triangle.json"
    p.write_text(json.dumps(TRIANGLE))
    return str(p)


@pytest.fixture
def problem_path(tmp_path):
    p = tmp_path / "tripod_halves.json"
    p.write_text(json.dumps(tripod_problem()))
    return str(p)


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


class TestDist:
    def test_vertex_to_midpoint(self, triangle_path, capsys):
        code, out = run_cli(
            ["dist", "--graph", triangle_path, "--from", "v:A", "--to", "e_BC:0.5"],
            capsys,
        )
        assert code == 0
        assert out == "1.5\n"

    def test_bad_point_literal(self, triangle_path, capsys):
        code, out = run_cli(
            ["dist", "--graph", triangle_path, "--from", "nope", "--to", "v:A"],
            capsys,
        )
        assert code == 1
        assert json.loads(out)["error"] == "parse-error"


class TestValidate:
    def test_valid_graph(self, triangle_path, capsys):
        code, out = run_cli(["validate", "--graph", triangle_path], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["ok"] is True
        assert obj["min_edge_length"] == 1.0

    def test_self_loop_rejected(self, tmp_path, capsys):
        bad = tmp_path / "bad_selfloop.json"
        bad.write_text(
            json.dumps(
                {
                    "vertices": ["A"],
                    "edges": [{"id": "e", "u": "A", "v": "A", "length": 1.0}],
                }
            )
        )
        code, out = run_cli(["validate", "--graph", str(bad)], capsys)
        assert code == 1
        assert json.loads(out)["error"] == "invalid-graph"

    def test_missing_file(self, capsys):
        code, out = run_cli(["validate", "--graph", "/nonexistent/g.json"], capsys)
        assert code == 1
        assert json.loads(out)["error"] == "file-not-found"

    def test_invalid_json(self, tmp_path, capsys):
        bad = tmp_path / "broken.json"
        bad.write_text("{not json")
        code, out = run_cli(["validate", "--graph", str(bad)], capsys)
        assert code == 1
        assert json.loads(out)["error"] == "parse-error"

    def test_invalid_measure(self, triangle_path, tmp_path, capsys):
        bad = tmp_path / "badm.json"
        bad.write_text(json.dumps({"atoms": [{"point": "v:A", "mass": 0.5}], "pieces": []}))
        code, out = run_cli(
            ["validate", "--graph", triangle_path, "--measure", str(bad)], capsys
        )
        assert code == 1
        assert json.loads(out)["error"] == "invalid-measure"


class TestW2:
    def test_two_diracs(self, triangle_path, tmp_path, capsys):
        m1 = tmp_path / "m1.json"
        m2 = tmp_path / "m2.json"
        m1.write_text(json.dumps({"atoms": [{"point": "v:A", "mass": 1.0}], "pieces": []}))
        m2.write_text(json.dumps({"atoms": [{"point": "v:B", "mass": 1.0}], "pieces": []}))
        code, out = run_cli(
            [
                "w2", "--graph", triangle_path,
                "--m1", str(m1), "--m2", str(m2), "--grid", "0.1",
            ],
            capsys,
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["w2"] == 1.0
        assert obj["plan"] == [{"source": "v:A", "target": "v:B", "mass": 1.0}]


class TestPhi:
    def test_unfolds_branch_measure(self, tmp_path, capsys):
        gpath = tmp_path / "tripod.json"
        gpath.write_text(json.dumps(TRIPOD))
        base = tmp_path / "base.json"
        base.write_text(json.dumps({"atoms": [{"point": "b1:0.75", "mass": 1.0}], "pieces": []}))
        nu = tmp_path / "nu.json"
        nu.write_text(json.dumps({"atoms": [{"point": "b2:0.6", "mass": 1.0}], "pieces": []}))
        code, out = run_cli(
            [
                "phi", "--graph", str(gpath), "--edge", "b1",
                "--base", str(base), "--measure", str(nu), "--grid", "0.01",
            ],
            capsys,
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["atoms"] == [{"mass": 1.0, "x": -0.6}]

    def test_non_minimizing_edge_code(self, tmp_path, capsys):
        gpath = tmp_path / "par.json"
        gpath.write_text(
            json.dumps(
                {
                    "vertices": ["P", "Q"],
                    "edges": [
                        {"id": "short", "u": "P", "v": "Q", "length": 1.0},
                        {"id": "long", "u": "P", "v": "Q", "length": 3.0},
                    ],
                }
            )
        )
        base = tmp_path / "base.json"
        base.write_text(json.dumps({"atoms": [{"point": "long:1.5", "mass": 1.0}], "pieces": []}))
        code, out = run_cli(
            [
                "phi", "--graph", str(gpath), "--edge", "long",
                "--base", str(base), "--measure", str(base), "--grid", "0.1",
            ],
            capsys,
        )
        assert code == 1
        assert json.loads(out)["error"] == "non-minimizing-edge"


class TestBary:
    def test_lp_concentrates_at_center(self, problem_path, capsys):
        code, out = run_cli(
            ["bary", "--problem", problem_path, "--grid", "0.015625"], capsys
        )
        assert code == 0
        obj = json.loads(out)
        center = [a for a in obj["measure"]["atoms"] if a["point"] == "v:o"]
        assert center and center[0]["mass"] >= 0.99

    def test_fixed_point_method(self, problem_path, capsys):
        code, out = run_cli(
            [
                "bary", "--problem", problem_path,
                "--method", "fixed-point", "--edge", "b1",
            ],
            capsys,
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["converged"] is True
        assert obj["measure"]["atoms"] == [{"mass": 1.0, "point": "v:o"}]

    def test_support_cap_env(self, problem_path, capsys, monkeypatch):
        monkeypatch.setenv("MGBARY_SUPPORT_CAP", "10")
        code, out = run_cli(["bary", "--problem", problem_path], capsys)
        assert code == 1
        assert json.loads(out)["error"] == "support-cap-exceeded"

    def test_byte_identical_runs(self, problem_path, capsys):
        _, first = run_cli(["bary", "--problem", problem_path], capsys)
        _, second = run_cli(["bary", "--problem", problem_path], capsys)
        assert first == second


class TestReport:
    def test_report_passes_and_writes_csv(self, problem_path, tmp_path, capsys):
        csv_path = tmp_path / "cells.csv"
        code, out = run_cli(
            ["report", "--problem", problem_path, "--csv", str(csv_path)], capsys
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["verdict"] == "PASS"
        assert obj["hypothesis_met"] is True
        assert obj["vertex_atoms"] == [{"mass": 1.0, "vertex": "o"}]
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "kind,location,offset,mass"
        assert any(line.startswith("vertex,o") for line in lines[1:])


class TestRoundTrip:
    def test_emitted_measure_reparses_to_equal_value(self, problem_path, tmp_path, capsys):
        code, out = run_cli(["bary", "--problem", problem_path], capsys)
        assert code == 0
        emitted = json.loads(out)["measure"]
        mpath = tmp_path / "emitted.json"
        mpath.write_text(json.dumps(emitted))
        gpath = tmp_path / "tripod.json"
        gpath.write_text(json.dumps(TRIPOD))
        code, out = run_cli(
            ["validate", "--graph", str(gpath), "--measure", str(mpath)], capsys
        )
        assert code == 0
        assert json.loads(out)["measure_ok"] is True


def test_console_entry_point_runs(tmp_path):
    gpath = tmp_path / "triangle.json"
    gpath.write_text(json.dumps(TRIANGLE))
    proc = subprocess.run(
        [
            sys.executable, "-m", "mgbary.cli",
            "dist", "--graph", str(gpath), "--from", "v:A", "--to", "e_BC:0.5",
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "1.5\n"
