from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any

log = logging.getLogger(__name__)

THREADS_ENV = "REEFOPT_THREADS"
DEFAULT_SEEDS = 5

DEFAULT_TOML = """\
# reefopt user defaults
# CLI flags override these; REEFOPT_THREADS overrides `threads`.

threads = 1          # evaluation threads for `run`, worker processes for `compare`
seeds = 5            # runs per variant for `reefopt compare`
# output_dir = "/path/to/runs"
"""


def load_config(config_path: Path | None = None) -> dict[str, Any]:
    """Load reefopt.toml user defaults.

    Parameters
    ----------
    config_path:
        Path to reefopt.toml. If None, uses ~/.config/reefopt/reefopt.toml

    Returns
    -------
    Dict with configuration, or empty dict if file doesn't exist or can't be parsed.
    """
    if config_path is None:
        from reefopt.core import xdg

        config_path = xdg.config_file()

    if not config_path.exists():
        log.debug("Config file not found: %s", config_path)
        return {}

    try:
        import tomllib
    except ImportError:
        try:
            import tomli as tomllib  # type: ignore[no-redef]
        except ImportError:
            log.warning("tomllib/tomli not available, cannot load config")
            return {}

    try:
        return tomllib.loads(config_path.read_text(encoding="utf-8"))
    except Exception as exc:
        log.warning("Could not parse config %s: %s", config_path, exc)
        return {}


def _positive_int(value: Any) -> int | None:
    try:
        number = int(value)
    except (TypeError, ValueError):
        return None
    return number if number >= 1 else None


def get_threads(config: dict[str, Any]) -> int:
    """Worker cap: REEFOPT_THREADS, then config `threads`, then 1."""
    env_value = os.environ.get(THREADS_ENV)
    if env_value is not None:
        threads = _positive_int(env_value)
        if threads is not None:
            return threads
        log.warning("Ignoring invalid %s=%r", THREADS_ENV, env_value)
    return _positive_int(config.get("threads")) or 1


def get_seeds(config: dict[str, Any]) -> int:
    """Runs per comparison variant; 5 when not configured."""
    return _positive_int(config.get("seeds")) or DEFAULT_SEEDS


def get_output_dir(config: dict[str, Any]) -> Path | None:
    """Configured output root, or None (caller falls back to XDG runs dir)."""
    value = config.get("output_dir")
    return Path(value).expanduser() if value else None
