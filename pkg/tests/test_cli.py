# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from pathlib import Path

import pytest

from xdiff.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from xdiff.io import read_diagnostics, read_snapshot


def test_run_preset(
    capsys: pytest.CaptureFixture[str], config_file: Path, tmp_path: Path
) -> None:
    out = tmp_path / "lyap"
    status = main(["run", str(config_file), "--preset", "lyapunov", "--out", str(out)])
    assert status == EXIT_OK
    assert "experiment lyapunov (seed 4): PASSED" in capsys.readouterr().out
    assert len(read_diagnostics(out / "diagnostics.csv")) > 2


def test_run_seed_override(
    capsys: pytest.CaptureFixture[str], config_file: Path
) -> None:
    assert main(["run", str(config_file), "--seed", "8"]) == EXIT_OK
    assert "experiment run (seed 8)" in capsys.readouterr().out


def test_run_identical_seeds_write_identical_csv(
    config_file: Path, tmp_path: Path
) -> None:
    for name in ("a", "b"):
        main(["run", str(config_file), "--out", str(tmp_path / name)])
    first = (tmp_path / "a" / "diagnostics.csv").read_bytes()
    assert first == (tmp_path / "b" / "diagnostics.csv").read_bytes()


def test_run_unusable_input(config_file: Path, tmp_path: Path) -> None:
    assert main(["run", str(tmp_path / "missing.toml")]) == EXIT_USAGE
    bad = tmp_path / "bad.toml"
    bad.write_text("[model]\nepsilon = 0\n", encoding="utf-8")
    assert main(["run", str(bad)]) == EXIT_USAGE
    assert main(["run", str(config_file), "--preset", "pattern"]) == EXIT_USAGE


def test_run_failed_check(config_file: Path, tmp_path: Path) -> None:
    stiff = tmp_path / "stiff.toml"
    stiff.write_text(
        config_file.read_text(encoding="utf-8").replace(
            "[time]\n", "[time]\ndt_min = 1.0\n"
        ),
        encoding="utf-8",
    )
    assert main(["run", str(stiff), "--out", str(tmp_path / "stiff")]) == EXIT_FAILED


def test_steady(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    status = main(
        ["steady", "--d", "1e-3", "--k", "2", "--cells", "256", "--out", str(tmp_path)]
    )
    assert status == EXIT_OK
    printed = capsys.readouterr().out
    assert "steady profile d=0.001, k=2" in printed
    assert "r1 = 0.000e+00" in printed
    w, header = read_snapshot(tmp_path / "w.xdiff")
    assert header["name"] == "w"
    assert w.grid.cells == (256,)
    assert (tmp_path / "u.xdiff").exists()


def test_steady_bad_parameters() -> None:
    assert main(["steady", "--d", "1e-3", "--k", "1"]) == EXIT_USAGE


def test_refine_needs_levels(config_file: Path) -> None:
    assert main(["refine", str(config_file), "--levels", "0.03125:1e-4"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as excinfo:
        main(["refine", str(config_file), "--levels", "0.1"])
    assert excinfo.value.code == EXIT_USAGE


def test_version(capsys: pytest.CaptureFixture[str]) -> None:
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.strip()
