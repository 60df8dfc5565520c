"""Strict JSON run configuration.

Example::

    {
      "problem": {"kind": "tmd", "building": {"preset": "two_storey"}},
      "engine": {"reef_size": 120, "iterations": 1000, "seed": 1},
      "substrates": [
        {"kind": "HS", "params": {"delta": [0.01, 0.02, 0.3, 0.5], "delta_mode": "absolute"}},
        {"kind": "DE", "schedules": {"f": [0.4, 0.1]}}
      ],
      "output_dir": "runs/tmd2"
    }

Unknown keys at any level are rejected before anything is computed.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from reefopt.core.errors import ConfigError
from reefopt.engine.params import RunParams
from reefopt.engine.problem import Problem
from reefopt.substrates.layers import SubstrateConfig

log = logging.getLogger(__name__)

_TOP_LEVEL = {"problem", "engine", "substrates", "output_dir"}
_REQUIRED = {"problem", "substrates"}

_INT_FIELDS = {"reef_size", "kappa", "iterations", "seed"}
_BOOL_FIELDS = {"budding_enabled"}
_OPTIONAL_INT_FIELDS = {"stagnation_window"}
_ENGINE_FIELDS = {f.name for f in fields(RunParams)} - {"substrates"}


@dataclass(frozen=True)
class RunConfig:
    problem: Mapping[str, Any]
    params: RunParams
    output_dir: Path | None = None
    source: Path | None = None

    @property
    def base_dir(self) -> Path | None:
        return self.source.parent if self.source is not None else None

    def build_problem(self) -> Problem:
        from reefopt.problems import build_problem

        return build_problem(self.problem, self.base_dir)

    def with_seed(self, seed: int) -> RunConfig:
        return replace(self, params=self.params.with_overrides(seed=seed))

    def with_substrates(self, substrates: tuple[SubstrateConfig, ...]) -> RunConfig:
        return replace(self, params=self.params.with_overrides(substrates=substrates))


def _engine_value(key: str, value: Any) -> Any:
    where = f"engine.{key}"
    if key in _BOOL_FIELDS:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true or false, got {value!r}")
        return value
    if key in _OPTIONAL_INT_FIELDS and value is None:
        return None
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if key in _INT_FIELDS or key in _OPTIONAL_INT_FIELDS:
        if not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def parse_run_config(data: Any, source: Path | None = None) -> RunConfig:
    """Validate a decoded JSON document and build the run parameters."""
    if not isinstance(data, dict):
        raise ConfigError("run config must be a JSON object")
    unknown = set(data) - _TOP_LEVEL
    if unknown:
        raise ConfigError(f"unknown top-level keys: {', '.join(sorted(unknown))}")
    missing = _REQUIRED - set(data)
    if missing:
        raise ConfigError(f"missing top-level keys: {', '.join(sorted(missing))}")

    problem = data["problem"]
    if not isinstance(problem, dict) or "kind" not in problem:
        raise ConfigError("problem: expected an object with a 'kind'")

    engine = data.get("engine", {})
    if not isinstance(engine, dict):
        raise ConfigError("engine: expected an object")
    unknown_engine = set(engine) - _ENGINE_FIELDS
    if unknown_engine:
        raise ConfigError(f"engine: unknown keys {', '.join(sorted(unknown_engine))}")

    raw_substrates = data["substrates"]
    if not isinstance(raw_substrates, list) or not raw_substrates:
        raise ConfigError("substrates: expected a non-empty list")
    substrates = tuple(
        SubstrateConfig.from_dict(item, f"substrates[{k}]") for k, item in enumerate(raw_substrates)
    )

    params = RunParams(
        substrates=substrates,
        **{key: _engine_value(key, value) for key, value in engine.items()},
    )

    output_dir = data.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError(f"output_dir: expected a string, got {output_dir!r}")
    out = Path(output_dir).expanduser() if output_dir else None
    if out is not None and not out.is_absolute() and source is not None:
        out = source.parent / out
    return RunConfig(problem=problem, params=params, output_dir=out, source=source)


def load_run_config(path: str | Path) -> RunConfig:
    """Read and validate a run configuration file.

    Raises
    ------
    FileNotFoundError:
        If *path* does not exist.
    ConfigError:
        On malformed JSON (message carries line and column) or any schema
        violation.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Run config not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        config = parse_run_config(data, source=path.resolve())
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    log.debug("Loaded run config %s", path)
    return config


def load_json(path: str | Path, what: str = "file") -> Any:
    """Decode a JSON side file (solutions), mapping syntax errors to ConfigError."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{what.capitalize()} not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
