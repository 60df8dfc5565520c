"""Tests for reefopt.toml user defaults."""

from pathlib import Path

import pytest

from reefopt.core import get_output_dir, get_seeds, get_threads, load_config
from reefopt.core.config import DEFAULT_TOML, THREADS_ENV


@pytest.fixture(autouse=True)
def _no_threads_env(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)


def test_missing_file_gives_empty_config(tmp_path):
    assert load_config(tmp_path / "reefopt.toml") == {}


def test_default_toml_parses(tmp_path):
    path = tmp_path / "reefopt.toml"
    path.write_text(DEFAULT_TOML)
    config = load_config(path)
    assert config == {"threads": 1, "seeds": 5}


def test_broken_toml_is_ignored(tmp_path):
    path = tmp_path / "reefopt.toml"
    path.write_text("threads = [\n")
    assert load_config(path) == {}


def test_default_path_uses_xdg(monkeypatch, tmp_path):
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path))
    (tmp_path / "reefopt").mkdir()
    (tmp_path / "reefopt" / "reefopt.toml").write_text("seeds = 3\n")
    assert get_seeds(load_config()) == 3


def test_threads_default_and_config():
    assert get_threads({}) == 1
    assert get_threads({"threads": 4}) == 4


def test_threads_env_overrides_config(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "6")
    assert get_threads({"threads": 2}) == 6


@pytest.mark.parametrize("value", ["0", "many", "-3"])
def test_invalid_threads_env_falls_back(monkeypatch, value):
    monkeypatch.setenv(THREADS_ENV, value)
    assert get_threads({"threads": 2}) == 2


@pytest.mark.parametrize("config, expected", [({}, 5), ({"seeds": 10}, 10), ({"seeds": 0}, 5), ({"seeds": "x"}, 5)])
def test_seeds(config, expected):
    assert get_seeds(config) == expected


def test_output_dir():
    assert get_output_dir({}) is None
    assert get_output_dir({"output_dir": "~/runs"}) == Path.home() / "runs"
