import json
import subprocess
import sys

import pytest

from maval.cli import COMMANDS, run


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


ABS2 = {"type": "max_affine", "pieces": [{"a": [sx, sy], "b": "0"} for sx in ("1", "-1") for sy in ("1", "-1")]}


@pytest.mark.parametrize("command", sorted(COMMANDS))
def test_selftests(command, capsys):
    assert run([command, "--selftest"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_ma_report_and_determinism(tmp_path):
    f = write(tmp_path, "f.json", ABS2)
    w = write(tmp_path, "w.json", [["-1", "1"], ["-1", "1"]])
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert run(["ma", "--input", f, "--window", w, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["result"]["atoms"] == [{"x": ["0", "0"], "w": "4"}]
    assert set(rep) == {"artifact", "version", "command", "seed", "spec_hash", "result"}


def test_spec_hash_depends_on_seed(tmp_path):
    p = write(tmp_path, "p.json", {"n": 2, "k": 1})
    a, b = tmp_path / "a", tmp_path / "b"
    run(["minors", "--input", p, "--out", str(a)])
    run(["minors", "--input", p, "--seed", "1", "--out", str(b)])
    assert json.loads(a.read_text())["spec_hash"] != json.loads(b.read_text())["spec_hash"]


def test_minors_flags(capsys):
    assert run(["minors", "--n", "2", "--k", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["result"]["dimension"] == 3


def test_malformed_json_exit_2(tmp_path, capsys):
    p = write(tmp_path, "bad.json", '{"n": 2,, }')
    assert run(["minors", "--input", p]) == 2
    assert "line 1" in capsys.readouterr().err


def test_schema_error_points_at_path(tmp_path, capsys):
    bad = {"function": {"type": "max_affine", "pieces": [{"a": ["1", "x"], "b": "0"}]}}
    assert run(["ma", "--input", write(tmp_path, "b.json", bad)]) == 2
    assert "/function/pieces/0/a/1" in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path):
    assert run(["minors", "--input", str(tmp_path / "nope.json")]) == 2


def test_negative_seed_exit_2():
    assert run(["minors", "--n", "1", "--k", "1", "--seed", "-1"]) == 2


def test_nonconvex_quadratic_exit_3(tmp_path):
    f = {"function": {"type": "quadratic", "A": [["-1"]]}}
    assert run(["ma", "--input", write(tmp_path, "q.json", f)]) == 3


def test_strict_eval_maps_exit_3(tmp_path, capsys):
    assert run(["eval-maps", "--input", write(tmp_path, "e.json", {"n": 1, "d": 1, "strict": True})]) == 3
    capsys.readouterr()
    assert run(["eval-maps", "--input", write(tmp_path, "e2.json", {"n": 1, "d": 1})]) == 0
    res = json.loads(capsys.readouterr().out)["result"]
    assert res["complete"] is False and res["unreachable"]


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "maval.cli", "minors", "--n", "3", "--k", "2"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert json.loads(r.stdout)["result"]["dimension"] == 6
