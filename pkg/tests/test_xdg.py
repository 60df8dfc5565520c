"""Tests for XDG path resolution."""

from pathlib import Path

from reefopt.core import xdg


def test_default_config_dir(monkeypatch):
    monkeypatch.delenv("XDG_CONFIG_HOME", raising=False)
    assert xdg.config_dir() == Path.home() / ".config" / "reefopt"


def test_config_file_under_custom_home(monkeypatch, tmp_path):
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "config"))
    assert xdg.config_file() == tmp_path / "config" / "reefopt" / "reefopt.toml"


def test_runs_dir_follows_data_home(monkeypatch, tmp_path):
    monkeypatch.setenv("XDG_DATA_HOME", str(tmp_path / "data"))
    assert xdg.runs_dir() == tmp_path / "data" / "reefopt" / "runs"


def test_empty_env_falls_back_to_home(monkeypatch):
    monkeypatch.setenv("XDG_DATA_HOME", "")
    assert xdg.runs_dir() == Path.home() / ".local" / "share" / "reefopt" / "runs"


def test_ensure_dirs_creates_structure(monkeypatch, tmp_path):
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "config"))
    monkeypatch.setenv("XDG_DATA_HOME", str(tmp_path / "data"))

    xdg.ensure_dirs()

    assert (tmp_path / "config" / "reefopt").is_dir()
    assert (tmp_path / "data" / "reefopt" / "runs").is_dir()


def test_dump_returns_all_keys(monkeypatch, tmp_path):
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path))
    paths = xdg.dump()
    assert set(paths) == {"config_dir", "config_file", "runs_dir"}
    assert paths["config_file"].parent == paths["config_dir"]
