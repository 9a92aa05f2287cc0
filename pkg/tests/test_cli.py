import io
import json

import pytest

from floquet_hb.cli import main

FAST_CONFIG = {
    "problem": {"name": "mathieu", "params": {"omega": 1.0, "alpha": 0.5}},
    "method": "hb",
    "n": 2,
    "steps": 500,
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "job.json"
    path.write_text(json.dumps(FAST_CONFIG))
    return str(path)


def test_solve_with_config_file(config_file, capsys):
    assert main(["solve", config_file]) == 0
    out, err = capsys.readouterr()
    report = json.loads(out)
    assert report["meta"]["status"] == "ok"
    assert report["rows"][0]["hb"] is not None
    assert "completed in" in err  # timing stays out of the report bytes


def test_solve_stdout_deterministic(config_file, capsys):
    assert main(["solve", config_file]) == 0
    first = capsys.readouterr().out
    assert main(["solve", config_file]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_stdin_config(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(FAST_CONFIG)))
    assert main(["solve", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["meta"]["status"] == "ok"


def test_flags_override_config(config_file, capsys):
    assert main(["solve", config_file, "--n", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["config"]["n"] == 3
    assert report["rows"][0]["hb"][0]["n"] == 3


def test_exit_code_2_paths(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", str(bad)]) == 2

    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps({"problem": {}}))  # no problem source
    assert main(["solve", str(invalid)]) == 2

    assert main(["solve", "--problem", "no_such_model"]) == 2
    assert main(["sweep", "--problem", "mathieu", "--sweep", "alpha=1:2"]) == 2
    assert main(["solve", "--problem", "mathieu", "--param", "alpha"]) == 2
    assert main(["solve", "--problem", "mathieu", "--format", "csv"]) == 2
    assert main([]) == 2  # missing subcommand
    capsys.readouterr()


def test_exit_code_3_partial_report(capsys):
    rc = main(
        [
            "solve",
            "--problem",
            "mathieu",
            "--param",
            "alpha=0.5",
            "--method",
            "commuting",
        ]
    )
    assert rc == 3
    report = json.loads(capsys.readouterr().out)
    assert report["meta"]["status"] == "partial"
    assert "structure not detected" in report["rows"][0]["status"]


def test_exit_code_4_unwritable_output(config_file, capsys):
    rc = main(["solve", config_file, "--out", "/nonexistent-dir/report.json"])
    assert rc == 4
    assert "i/o error" in capsys.readouterr().err


def test_sweep_from_flags(capsys):
    rc = main(
        [
            "sweep",
            "--problem",
            "mathieu",
            "--param",
            "omega=1.0",
            "--method",
            "hb",
            "--n",
            "3",
            "--steps",
            "500",
            "--sweep",
            "alpha=0.1:1.0:5",
        ]
    )
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    alphas = [row["param"]["alpha"] for row in report["rows"]]
    assert alphas == pytest.approx([0.1, 0.325, 0.55, 0.775, 1.0])
    assert all(row["status"] == "ok" for row in report["rows"])


def test_catalog_listing(capsys):
    assert main(["catalog"]) == 0
    out = capsys.readouterr().out
    assert "mathieu(omega, alpha)" in out
    assert "commuting_example" in out
    assert "marcus_yamabe" in out


def test_export_subcommand(capsys):
    rc = main(
        [
            "export",
            "--problem",
            "mathieu",
            "--param",
            "alpha=0.5",
            "--n",
            "2",
            "--steps",
            "320",
            "--points",
            "64",
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert lines[0] == "t,x_a_re,x_a_im,x_ref_re,x_ref_im,abs_error"
    assert len(lines) == 66


def test_csv_format_to_file(config_file, tmp_path, capsys):
    out_path = tmp_path / "report.csv"
    rc = main(["solve", config_file, "--out", str(out_path), "--format", "csv"])
    assert rc == 0
    captured = capsys.readouterr()
    assert captured.out == ""  # report went to the file
    assert f"wrote {out_path}" in captured.err
    text = out_path.read_text()
    assert text.startswith("lambda_e1_re,")


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("floquet-hb ")
