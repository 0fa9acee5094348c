import json
import subprocess
import sys

import pytest

from torifan import cli
from torifan.deltafan import InvariantViolation
from torifan.report import reverify_report


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
        return str(p)

    return write


def test_arrows_command(files, tmp_path):
    cone_file = files("example.json", {"rank": 3, "rays": [[1, 0, 0], [0, 1, 0], [1, 2, 4]]})
    out = tmp_path / "r.json"
    assert cli.main(["arrows", "--cone", cone_file, "--w", "1,2,2", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["arrows"][0]["dim_bound"] == 1
    assert reverify_report(doc) == []


def test_delta_with_svg(files, tmp_path, capsys):
    cone_file = files("a1.json", {"rank": 2, "rays": [[1, 0], [1, 2]]})
    svg = tmp_path / "a1.svg"
    assert cli.main(["delta", "--cone", cone_file, "--svg", str(svg), "--grid-l", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["delta"]["rays"] == [[1, 0], [1, 1], [1, 2]]
    assert svg.read_text().startswith("<svg")


def test_fan_checks_via_cli(files, capsys):
    cone_file = files("sq.json", {"rank": 3, "rays": [[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]]})
    fan_file = files("fan.json", {"rank": 3, "rays": [[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]], "cones": [[0, 1, 2], [1, 2, 3]]})
    assert cli.main(["crepant", "--cone", cone_file, "--fan", fan_file]) == 0
    assert json.loads(capsys.readouterr().out)["fan_check"]["crepant"] is True


@pytest.mark.parametrize(
    "argv_tail, content",
    [
        (["dual"], '{"rank": 2, "rays": [[0, 0]]}'),
        (["dual"], '{"rank": 2, "rays": [[1, 0.5]]}'),
        (["dual"], "not json"),
        (["arrows"], '{"rank": 2, "rays": [[1, 0], [1, 2]]}'),
        (["arrows", "--w", "1,x"], '{"rank": 2, "rays": [[1, 0], [1, 2]]}'),
        (["dual", "--svg", "x.svg"], '{"rank": 2, "rays": [[1, 0], [1, 2]]}'),
        (["moderate"], '{"rank": 2, "rays": [[1, 0], [1, 2]]}'),
    ],
)
def test_input_errors_exit_1(files, capsys, argv_tail, content):
    cone_file = files("c.json", content)
    assert cli.main([argv_tail[0], "--cone", cone_file, *argv_tail[1:]]) == 1
    assert "input error" in capsys.readouterr().err


def test_missing_file_exits_1(tmp_path, capsys):
    assert cli.main(["dual", "--cone", str(tmp_path / "nope.json")]) == 1


def test_budget_exit_2(files, capsys):
    cone_file = files("example.json", {"rank": 3, "rays": [[1, 0, 0], [0, 1, 0], [1, 2, 4]]})
    assert cli.main(["delta", "--cone", cone_file, "--budget", "3"]) == 2
    assert "budget exceeded" in capsys.readouterr().err


def test_internal_error_exit_3(files, monkeypatch, capsys):
    def boom(_req):
        raise InvariantViolation("one Xi set on two separate regions")

    monkeypatch.setattr(cli, "run_report", boom)
    cone_file = files("a1.json", {"rank": 2, "rays": [[1, 0], [1, 2]]})
    assert cli.main(["delta", "--cone", cone_file]) == 3
    assert "invariant" in capsys.readouterr().err


def test_console_script_entry_point(files):
    cone_file = files("a1.json", {"rank": 2, "rays": [[1, 0], [1, 2]]})
    res = subprocess.run(
        [sys.executable, "-m", "torifan.cli", "hilbert", "--cone", cone_file],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["hilbert_basis"]["B"] == [[1, 0], [1, 1], [1, 2]]
