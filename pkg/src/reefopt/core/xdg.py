from __future__ import annotations

import os
from pathlib import Path

# ---------------------------------------------------------------------------
# XDG roots
# ---------------------------------------------------------------------------


def _xdg_config_home() -> Path:
    return Path(os.environ.get("XDG_CONFIG_HOME") or (Path.home() / ".config"))


def _xdg_data_home() -> Path:
    return Path(os.environ.get("XDG_DATA_HOME") or (Path.home() / ".local" / "share"))


# ---------------------------------------------------------------------------
# reefopt paths
# ---------------------------------------------------------------------------


def config_dir() -> Path:
    """~/.config/reefopt: user defaults."""
    return _xdg_config_home() / "reefopt"


def config_file() -> Path:
    return config_dir() / "reefopt.toml"


def runs_dir() -> Path:
    """~/.local/share/reefopt/runs: run artifacts when neither --out nor output_dir is set."""
    return _xdg_data_home() / "reefopt" / "runs"


def ensure_dirs() -> None:
    for d in (config_dir(), runs_dir()):
        d.mkdir(parents=True, exist_ok=True)


# ---------------------------------------------------------------------------
# Debug helper
# ---------------------------------------------------------------------------


def dump() -> dict[str, Path]:
    """All reefopt paths, logged with --verbose."""
    return {
        "config_dir": config_dir(),
        "config_file": config_file(),
        "runs_dir": runs_dir(),
    }
