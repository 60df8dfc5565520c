"""Full-budget optimization runs on the shipped configs.

These take minutes; run them with ``pytest -m slow``.
"""

import csv
import os
from pathlib import Path

import numpy as np
import pytest

from reefopt.cli.main import EXIT_OK, main
from reefopt.core.config import THREADS_ENV
from reefopt.core.runconfig import load_run_config
from reefopt.engine.cro import run
from reefopt.problems import build_problem
from reefopt.problems.bsop import HOURS, deterministic_schedule

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

pytestmark = pytest.mark.slow


@pytest.fixture(autouse=True)
def _isolated_home(monkeypatch, tmp_path):
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "config"))
    monkeypatch.setenv("XDG_DATA_HOME", str(tmp_path / "data"))
    monkeypatch.setenv(THREADS_ENV, str(os.cpu_count() or 1))


def test_tmd_two_storey_compare(tmp_path):
    out = tmp_path / "cmp"
    config = str(CONFIGS / "tmd_two_storey.json")
    assert main(["compare", "--config", config, "--seeds", "5", "--out", str(out)]) == EXIT_OK

    with (out / "compare.csv").open(newline="") as fh:
        rows = {row["variant"]: row for row in csv.DictReader(fh)}
    cro_sl = float(rows.pop("cro-sl")["min"])
    assert cro_sl <= 8.8
    assert cro_sl <= 1.05 * min(float(row["min"]) for row in rows.values())


@pytest.mark.parametrize("scenario_seed", [1, 2, 3])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_bsop_cro_sl_beats_the_baselines(scenario_seed, seed):
    config = load_run_config(CONFIGS / "bsop_synthetic.json")
    problem = build_problem({**config.problem, "synthetic_seed": scenario_seed}, config.base_dir)

    no_battery = problem.evaluate(np.zeros(HOURS))
    deterministic = problem.evaluate(deterministic_schedule(problem.scenario))
    best, _ = run(config.params.with_overrides(seed=seed), problem)

    assert best.fitness <= deterministic + 1e-9
    assert deterministic <= no_battery + 1e-9
