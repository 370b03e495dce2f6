"""Tests for the command-line layer: parsing, config files, exit codes."""

import shutil
import subprocess
import sys

import pytest

from nls_inflation_lab.cli import main, read_config_file

TREES_GOLDEN = (
    "# nls-inflation-lab v1\n"
    "j,count,enum_checked,bound_ratio\n"
    "0,1,1,1.0\n"
    "1,1,1,0.16425571607494938\n"
    "2,3,1,0.045528649194309274\n"
)

INFLATE_ARGS = [
    "inflate", "--set", "d=1", "--set", "s=-2.5", "--set", "N=16",
    "--set", "J=1", "--set", "n=1", "--set", "margin=1", "--set", "nodes=64",
    "--set", "t_points=1",
]


def test_trees_stdout_roundtrip(capsys):
    rc = main(["trees", "--set", "jmax=2", "--no-timestamp"])
    captured = capsys.readouterr()
    assert rc == 0
    assert captured.out.startswith(TREES_GOLDEN)
    tail = captured.out[len(TREES_GOLDEN):]
    assert "jmax: 2" in tail
    assert "all_ok: true" in tail
    assert tail.rstrip().endswith("exit_code: 0")
    assert captured.err == ""


def test_out_file_and_summary_flag(tmp_path, capsys):
    out = tmp_path / "trees.csv"
    rc = main([
        "trees", "--set", "jmax=2", "--no-timestamp",
        "--out", str(out), "--summary",
    ])
    captured = capsys.readouterr()
    assert rc == 0
    assert out.read_text() == TREES_GOLDEN
    assert "bound_ratio" not in captured.out  # CSV went to the file
    assert "exit_code: 0" in captured.out
    assert captured.err.strip() == (
        "jmax=2 enum_ok=true bound_ok=true all_ok=true"
    )


def test_timestamp_comment_present_by_default(capsys):
    rc = main(["trees", "--set", "jmax=0"])
    captured = capsys.readouterr()
    assert rc == 0
    assert captured.out.splitlines()[1].startswith("# generated 20")


def test_config_file_with_set_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# audit depth\njmax = 1\n\n")
    rc = main(["trees", "--config", str(cfg), "--set", "jmax=2",
               "--no-timestamp"])
    captured = capsys.readouterr()
    assert rc == 0
    assert captured.out.startswith(TREES_GOLDEN)  # override won: 3 rows


def test_read_config_file_rejects_malformed(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("jmax\n")
    with pytest.raises(ValueError, match="expected key=value"):
        read_config_file(str(cfg))


def test_usage_errors_return_code_1(tmp_path, capsys):
    cases = [
        ["trees", "--set", "bogus=1"],
        ["trees", "--set", "jmax=abc"],
        ["trees", "--set", "jmax"],
        ["trees", "--config", str(tmp_path / "missing.cfg")],
        ["xi1-bound", "--set", "c=0.5"],
        ["no-such-command"],
        [],
    ]
    for argv in cases:
        rc = main(argv)
        captured = capsys.readouterr()
        assert rc == 1, argv
        assert captured.err.startswith("error:"), argv


def test_unknown_key_names_the_command(capsys):
    rc = main(["sweep", "--set", "axis=R", "--set", "d=1", "--set", "jmax=3"])
    captured = capsys.readouterr()
    assert rc == 1
    assert "unknown configuration keys for sweep: jmax" in captured.err


def test_numerical_guard_returns_code_3(capsys):
    rc = main(["trees", "--set", "jmax=9"])
    captured = capsys.readouterr()
    assert rc == 3
    assert captured.err.startswith("numerical guard:")


@pytest.mark.parametrize(
    "u0,expected",
    [("zero", 0), ("gaussian(1,1)", 4), ("gaussian(2,1)", 2)],
)
def test_inflate_exit_code_contract(u0, expected, capsys):
    rc = main(INFLATE_ARGS + ["--set", f"u0={u0}", "--no-timestamp"])
    captured = capsys.readouterr()
    assert rc == expected
    assert f"exit_code: {expected}" in captured.out


def test_module_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "nls_inflation_lab.cli",
         "trees", "--set", "jmax=2", "--no-timestamp"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith(TREES_GOLDEN)


@pytest.mark.skipif(
    shutil.which("nls-inflation-lab") is None,
    reason="console script not on PATH",
)
def test_console_script_subprocess():
    proc = subprocess.run(
        ["nls-inflation-lab", "trees", "--set", "jmax=2", "--no-timestamp"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith(TREES_GOLDEN)
