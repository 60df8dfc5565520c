"""Objective problems and their run-config blocks.

Kinds
-----
  sphere          sum(x**2) sanity objective
  bsop            weekly micro-grid battery scheduling (euro)
  tmd             TMD design on a shear building (FRF infinity norm)
  antenna_trace   S11 score of a single-resonator surrogate (negated)
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from reefopt.core.errors import ConfigError
from reefopt.engine.problem import Problem, SphereProblem

from .antenna import AntennaTraceProblem, S11Trace, antenna_fitness, load_trace, synth_trace
from .bsop import BatterySpec, BsopProblem, Tariff, load_profiles, synth_profiles
from .tmd import PRESET_MASS_BOUND, BuildingSpec, FrfGrid, TmdBounds, TmdDesign, TmdProblem

log = logging.getLogger(__name__)

PROBLEM_KINDS = ("sphere", "bsop", "tmd", "antenna_trace")

_FIELDS: dict[str, set[str]] = {
    "sphere": {"dimension", "lower", "upper"},
    "bsop": {"profiles", "synthetic_seed", "battery", "tariff"},
    "tmd": {"building", "n_tmd", "bounds", "grid", "fixed_floors"},
    "antenna_trace": {"f0_bounds", "q_bounds", "r_bounds"},
}

__all__ = [
    "PROBLEM_KINDS",
    "AntennaTraceProblem",
    "BsopProblem",
    "SphereProblem",
    "TmdProblem",
    "S11Trace",
    "antenna_fitness",
    "build_problem",
    "evaluate_solution",
    "load_trace",
    "synth_trace",
]


def _resolve(path: str, base_dir: Path | None) -> Path:
    p = Path(path).expanduser()
    if not p.is_absolute() and base_dir is not None:
        p = base_dir / p
    return p


def _pair(raw: Any, where: str) -> tuple[float, float]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ConfigError(f"{where}: expected a [lower, upper] pair, got {raw!r}")
    return float(raw[0]), float(raw[1])


def build_problem(block: Mapping[str, Any], base_dir: Path | None = None) -> Problem:
    """Instantiate the problem described by a run config's ``problem`` block.

    Relative file paths resolve against *base_dir* (the config file's directory).
    """
    kind = block.get("kind")
    if kind not in _FIELDS:
        raise ConfigError(
            f"problem.kind must be one of {', '.join(PROBLEM_KINDS)}, got {kind!r}"
        )
    params = {k: v for k, v in block.items() if k != "kind"}
    unknown = set(params) - _FIELDS[kind]
    if unknown:
        raise ConfigError(f"problem: unknown keys for {kind!r}: {sorted(unknown)}")

    if kind == "sphere":
        return SphereProblem(
            dimension=int(params.get("dimension", 10)),
            lower=float(params.get("lower", -5.0)),
            upper=float(params.get("upper", 5.0)),
        )

    if kind == "bsop":
        battery = BatterySpec.from_dict(params.get("battery", {}))
        tariff = Tariff.from_dict(params.get("tariff", {}))
        if "profiles" in params and "synthetic_seed" in params:
            raise ConfigError("problem: give either 'profiles' or 'synthetic_seed', not both")
        if "profiles" in params:
            scenario = load_profiles(_resolve(params["profiles"], base_dir), battery, tariff)
        else:
            scenario = synth_profiles(int(params.get("synthetic_seed", 1)), battery, tariff)
        return BsopProblem(scenario)

    if kind == "tmd":
        building = BuildingSpec.from_dict(params.get("building", {"preset": "two_storey"}))
        bounds_raw = dict(params.get("bounds", {}))
        unknown_bounds = set(bounds_raw) - {"omega_max", "xi_max", "mass_max"}
        if unknown_bounds:
            raise ConfigError(f"problem.bounds: unknown keys {sorted(unknown_bounds)}")
        bounds_raw.setdefault("mass_max", PRESET_MASS_BOUND.get(building.name, 0.05))
        return TmdProblem(
            building,
            n_tmd=int(params["n_tmd"]) if "n_tmd" in params else None,
            bounds=TmdBounds(**{k: float(v) for k, v in bounds_raw.items()}),
            grid=FrfGrid.from_dict(params.get("grid", {})),
            fixed_floors=params.get("fixed_floors"),
        )

    kwargs = {key: _pair(params[key], f"problem.{key}") for key in _FIELDS[kind] if key in params}
    return AntennaTraceProblem(**kwargs)


def evaluate_solution(
    problem: Problem, solution: Mapping[str, Any], base_dir: Path | None = None
) -> float:
    """Cost of a stored solution.

    TMD solutions use ``omega/xi/mass/floors``, BSOP ``schedule``, antenna
    ``genome`` or a measured ``trace`` CSV, every kind accepts ``genome``.
    """
    if isinstance(problem, TmdProblem) and "genome" not in solution:
        design = TmdDesign.from_dict(solution)
        _warn_out_of_bounds(problem, design.to_genome(), check_length=design.n_tmd == problem.n_tmd)
        return problem.evaluate_design(design)
    if isinstance(problem, AntennaTraceProblem) and "trace" in solution:
        return -antenna_fitness(load_trace(_resolve(solution["trace"], base_dir)))

    key = "schedule" if isinstance(problem, BsopProblem) and "schedule" in solution else "genome"
    if key not in solution:
        raise ConfigError(f"Solution file needs a {key!r} list")
    genome = np.asarray(solution[key], dtype=float)
    if genome.shape != (len(problem.encoding),):
        raise ConfigError(
            f"Solution has {genome.size} values, the {problem.kind} problem expects {len(problem.encoding)}"
        )
    _warn_out_of_bounds(problem, genome)
    return problem.evaluate(problem.repair(genome))


def _warn_out_of_bounds(problem: Problem, genome: np.ndarray, check_length: bool = True) -> None:
    if check_length and not problem.encoding.contains(genome):
        log.warning("Solution lies outside the %s problem bounds; evaluating it as given", problem.kind)
