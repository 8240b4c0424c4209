"""Unit tests for the pseudolab command line."""

from __future__ import annotations

import json
import sys
from importlib.metadata import PackageNotFoundError
from pathlib import Path

import pytest

from pseudolab import __version__, cli
from pseudolab.cli import EXIT_EXPERIMENT_FAILED, EXIT_INVALID_CONFIG, EXIT_USAGE, _get_version, load_config, main
from pseudolab.exceptions import ExperimentError
from pseudolab.experiments import FAMILY_RUNNERS


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    """A small flow-check configuration writing below tmp_path."""
    path = tmp_path / "config.json"
    document = {"grid": {"n": 31}, "time": {"steps": 24}, "families": ["flow-check"], "output_dir": str(tmp_path / "results")}
    path.write_text(json.dumps(document))
    return path


class TestVersion:
    """Tests for ``pseudolab --version``."""

    def test_get_version_returns_nonempty_string(self) -> None:
        version = _get_version()
        assert isinstance(version, str)
        assert version

    def test_version_flag_prints_version_and_exits_zero(self, capsys: pytest.CaptureFixture[str]) -> None:
        with pytest.raises(SystemExit) as exc_info:
            main(["--version"])

        assert exc_info.value.code == 0
        assert f"pseudolab {_get_version()}" in capsys.readouterr().out

    def test_no_subcommand_exits_nonzero(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setattr(sys, "argv", ["pseudolab"])

        with pytest.raises(SystemExit) as exc_info:
            main()

        assert exc_info.value.code != 0

    def test_uses_installed_metadata(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setattr(cli, "version", lambda name: "9.9.9")

        assert _get_version() == "9.9.9"

    def test_falls_back_to_source_version(self, monkeypatch: pytest.MonkeyPatch) -> None:
        def _missing(name: str) -> str:
            raise PackageNotFoundError(name)

        monkeypatch.setattr(cli, "version", _missing)

        assert _get_version() == __version__


class TestLoadConfig:
    """Tests for load_config()."""

    def test_missing_file(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert load_config(tmp_path / "absent.json") is None
        assert "configuration file not found" in capsys.readouterr().out

    def test_invalid_field_is_reported(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "bad.json"
        path.write_text('{"hum": {"beta": -1.0}}')

        assert load_config(path) is None
        out = capsys.readouterr().out
        assert "invalid configuration" in out
        assert "hum.beta" in out

    def test_valid_file(self, config_file: Path) -> None:
        config = load_config(config_file)

        assert config is not None
        assert config.grid.n == 31


class TestRunCommand:
    """Tests for ``pseudolab run``."""

    def test_successful_run_exits_normally(self, config_file: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        main(["run", "--config", str(config_file), "--quiet"])

        assert (tmp_path / "results" / "manifest.json").exists()
        assert "Wrote 1 file(s)" in capsys.readouterr().out

    def test_out_flag(self, config_file: Path, tmp_path: Path) -> None:
        main(["run", "--config", str(config_file), "--out", str(tmp_path / "other"), "--quiet"])

        assert (tmp_path / "other" / "flow_check.csv").exists()

    def test_invalid_config_exits_one(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.json"
        path.write_text('{"families": []}')

        with pytest.raises(SystemExit) as exc_info:
            main(["run", "--config", str(path)])

        assert exc_info.value.code == EXIT_INVALID_CONFIG

    def test_missing_config_exits_one(self, tmp_path: Path) -> None:
        with pytest.raises(SystemExit) as exc_info:
            main(["run", "--config", str(tmp_path / "absent.json")])

        assert exc_info.value.code == EXIT_INVALID_CONFIG

    def test_failed_family_exits_two(self, config_file: Path, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
        def _broken(config, out):
            raise ExperimentError("boom")

        monkeypatch.setitem(FAMILY_RUNNERS, "flow-check", _broken)

        with pytest.raises(SystemExit) as exc_info:
            main(["run", "--config", str(config_file), "--quiet"])

        assert exc_info.value.code == EXIT_EXPERIMENT_FAILED
        assert "flow-check failed: ExperimentError: boom" in capsys.readouterr().out

    def test_unknown_family_is_a_usage_error(self, config_file: Path) -> None:
        with pytest.raises(SystemExit) as exc_info:
            main(["run", "--config", str(config_file), "--only", "teleport"])

        assert exc_info.value.code == EXIT_USAGE
        assert EXIT_USAGE not in (EXIT_INVALID_CONFIG, EXIT_EXPERIMENT_FAILED)

    def test_missing_required_option_is_a_usage_error(self) -> None:
        with pytest.raises(SystemExit) as exc_info:
            main(["run"])

        assert exc_info.value.code == EXIT_USAGE

    def test_verbose_and_quiet_are_exclusive(self, config_file: Path) -> None:
        with pytest.raises(SystemExit):
            main(["run", "--config", str(config_file), "--verbose", "--quiet"])


class TestConfigCommand:
    def test_prints_default_configuration(self, capsys: pytest.CaptureFixture[str]) -> None:
        main(["config"])

        document = json.loads(capsys.readouterr().out)
        assert document["grid"]["n"] == 200
        assert document["families"][0] == "beam-bzk"
