import json

from barricade.cli import main


def test_gallery_single_item(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["gallery", "parabola", "--no-meta", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["gallery"][0]["status"] == "HasSSP"
    assert "meta" not in rep and "wall_time" not in rep["tasks"][0]


def test_gallery_unknown_name_is_usage_error(capsys):
    assert main(["gallery", "nope"]) == 2


def test_gallery_requires_name_or_all(capsys):
    assert main(["gallery"]) == 2


def test_bad_flag_exits_2(capsys):
    try:
        main(["gallery", "--bogus"])
    except SystemExit as exc:
        assert exc.code == 2
    else:
        raise AssertionError("expected SystemExit")


def test_analyze_and_mismatch_exit_code(tmp_path, capsys):
    sc = {"schema": "barricade/1", "dimension": 2,
          "sets": {"E": {"kind": "epigraph1d", "phi": {"tag": "exp"}}},
          "tasks": [{"kind": "ssp", "set": "E", "expected": "HasSSP"}]}
    p = tmp_path / "s.json"
    p.write_text(json.dumps(sc))
    assert main(["analyze", str(p), "--no-meta"]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert rep["tasks"][0]["status"] == "LacksSSP" and rep["tasks"][0]["match"] is False


def test_schema_error_exit_code(tmp_path, capsys):
    p = tmp_path / "s.json"
    p.write_text('{"schema": "barricade/1"}')
    assert main(["analyze", str(p)]) == 2
    assert "dimension" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "missing.json")]) == 2


def test_solve_runs_only_solve_tasks(tmp_path, capsys):
    sc = {"schema": "barricade/1", "dimension": 2,
          "sets": {"M": {"kind": "ball", "center": [0, 0], "radius": 1}},
          "functions": {"f": {"kind": "affine", "a": [1, 0]}},
          "tasks": [{"kind": "ssp", "set": "M"},
                    {"kind": "solve", "set": "M", "function": "f",
                     "expected": "NonemptyCompact"}]}
    p = tmp_path / "s.json"
    p.write_text(json.dumps(sc))
    assert main(["solve", str(p), "--no-meta", "--seed", "3"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert [t["task"]["kind"] for t in rep["tasks"]] == ["solve"]
    assert rep["seed"] == 3
