"""Command-line runner: reports, exit codes, config layering and artifacts."""

import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from lorentzcauchy.cli import EXIT_INPUT, EXIT_INVARIANT, EXIT_OK, main
from lorentzcauchy.report import SCOPE_NOTE

DATA = Path(__file__).resolve().parents[1] / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


def values(report):
    return {v["check"]: v["value"] for v in report["verdicts"]}


def test_dj_pair_on_strip_slices(capsys):
    code, report, _ = run_json(capsys, "dj", "pair", "--model", "strip", "--a", "0.2", "--b", "0.7")
    assert code == EXIT_OK
    assert report["subcommand"] == "dj pair"
    assert set(report) == {"subcommand", "config", "verdicts", "witnesses", "timing"}
    assert values(report)["dj"] == pytest.approx(0.5, abs=1e-12)


def test_dj_pair_cone_constants(capsys):
    code, report, _ = run_json(capsys, "dj", "pair", "--resolution", "2", "--a", "1", "--b", "3")
    assert code == EXIT_OK
    assert values(report)["dj"] == pytest.approx(2.0, abs=1e-12)


def test_dj_pair_needs_both_sets(capsys):
    code, report, err = run_json(capsys, "dj", "pair", "--model", "strip", "--a", "0.2")
    assert code == EXIT_INPUT
    assert "error" in report and "dj pair" in err


def test_timefn_build_three_chain(capsys, tmp_path):
    code, _, _ = run(capsys, "timefn", "build", "--space", str(DATA / "3chain.json"), "--out", str(tmp_path))
    assert code == EXIT_OK
    rows = (tmp_path / "tau.csv").read_text().splitlines()
    assert rows[0] == "label,f,g,tau"
    b = rows[2].split(",")
    assert b[0] == "b" and float(b[3]) == pytest.approx(math.log(4.0), abs=1e-15)
    report = json.loads((tmp_path / "timefn_build.json").read_text())
    assert values(report)["tau:a"] == "-inf"


def test_timefn_levels_negative_level(capsys):
    code, report, _ = run_json(capsys, "timefn", "levels", "--space", str(DATA / "3chain.json"), "--levels=-1,0,2")
    assert code == EXIT_OK
    assert [values(report)[f"level:{v}"] for v in ("-1", "0", "2")] == [[1, 1]] * 3


def test_cycle_fails_antisymmetry(capsys):
    code, report, err = run_json(capsys, "space", "check", "--space", str(DATA / "cycle.json"))
    assert code == EXIT_INVARIANT
    assert report["error"]["class"] == "antisymmetry"
    assert "antisymmetry" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["space", "check", "--space", "no/such/file.json"],
        ["dj", "pair", "--model", "strip", "--a", "0.2", "--b", "1.5"],
        ["mesh", "build", "--resolution", "0"],
    ],
)
def test_bad_input_exits_three(capsys, argv):
    code, report, _ = run_json(capsys, *argv)
    assert code == EXIT_INPUT
    assert report["error"]["class"]


@pytest.mark.parametrize("argv", [["dj", "pair", "--a", "oops"], ["nosuch"], ["timefn", "levels", "--levels", "-1,0"]])
def test_parser_errors_exit_three(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_INPUT


def test_same_seed_same_report(capsys):
    argv = ["dj", "axioms", "--resolution", "2", "--count", "6", "--trials", "40", "--seed", "9"]
    _, a, _ = run_json(capsys, *argv)
    _, b, _ = run_json(capsys, *argv)
    a.pop("timing"), b.pop("timing")
    assert a == b


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# strip slices\n[dj]\nmodel = \"strip\"\na = 0.1\nb = 0.6\nsamples = 5\n")
    code, report, _ = run_json(capsys, "dj", "pair", "--config", str(cfg))
    assert code == EXIT_OK and values(report)["dj"] == pytest.approx(0.5)
    assert report["config"]["model"] == "strip"
    _, report, _ = run_json(capsys, "dj", "pair", "--config", str(cfg), "--b", "0.9")
    assert values(report)["dj"] == pytest.approx(0.8)


def test_mesh_build_writes_artifacts(capsys, tmp_path):
    code, out, _ = run(capsys, "mesh", "build", "--resolution", "2", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert {"mesh_build.json", "mesh.json", "oracle.bin"} <= {p.name for p in tmp_path.iterdir()}
    assert "subcommand" in out.splitlines()[0]
    # the cached mesh and oracle feed later runs
    code, report, _ = run_json(
        capsys, "dj", "pair", "--mesh", str(tmp_path / "mesh.json"), "--oracle", str(tmp_path / "oracle.bin"), "--a", "1", "--b", "2"
    )
    assert code == EXIT_OK and values(report)["dj"] == pytest.approx(1.0)


def test_complete_strip_carries_scope_note(capsys):
    code, report, _ = run_json(capsys, "complete", "strip", "--terms", "32")
    assert code == EXIT_OK
    assert any(v["detail"] == SCOPE_NOTE for v in report["verdicts"])


def test_report_aggregates(capsys, tmp_path):
    run(capsys, "timefn", "build", "--space", str(DATA / "3chain.json"), "--out", str(tmp_path / "a"))
    run(capsys, "space", "check", "--space", str(DATA / "cycle.json"), "--out", str(tmp_path / "b"))
    code, report, _ = run_json(capsys, "report", str(tmp_path / "a" / "timefn_build.json"), str(tmp_path / "b" / "space_check.json"))
    assert code == EXIT_INVARIANT
    checks = [v["check"] for v in report["verdicts"]]
    assert "timefn build:monotone" in checks and "space check:invariant:antisymmetry" in checks
    assert report["verdicts"][-1]["detail"] == SCOPE_NOTE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lorentzcauchy", "space", "check", "--space", str(DATA / "3chain.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_OK, proc.stderr
    assert json.loads(proc.stdout)["subcommand"] == "space check"
