from __future__ import annotations

import logging
from typing import Any

import numpy as np

from reefopt.engine.encoding import EncodingSpec
from reefopt.engine.problem import Problem

from .battery import deterministic_schedule, simulate_soc_repair
from .billing import Bill, billing
from .scenario import HOURS, MicroGridScenario

log = logging.getLogger(__name__)


def grid_exchange(schedule: np.ndarray, scenario: MicroGridScenario) -> np.ndarray:
    """P = L1 + L2 - F - W + B for an already feasible schedule."""
    return scenario.net_load + schedule


def bsop_bill(genome: np.ndarray, scenario: MicroGridScenario) -> Bill:
    repaired, _ = simulate_soc_repair(genome, scenario.battery)
    return billing(grid_exchange(repaired, scenario), scenario.tariff)


def bsop_fitness(genome: np.ndarray, scenario: MicroGridScenario) -> float:
    """Weekly cost in euro of the repaired battery schedule *genome*."""
    if len(genome) != HOURS:
        raise ValueError(f"Battery schedule must have {HOURS} values, got {len(genome)}")
    return bsop_bill(genome, scenario).total


class BsopProblem(Problem):
    """168 hourly battery powers in [-p_max_discharge, p_max_charge], seeded with the greedy baseline."""

    kind = "bsop"

    def __init__(self, scenario: MicroGridScenario) -> None:
        battery = scenario.battery
        super().__init__(
            EncodingSpec.uniform(HOURS, -battery.p_max_discharge_kw, battery.p_max_charge_kw)
        )
        self.scenario = scenario

    def evaluate(self, genome: np.ndarray) -> float:
        return bsop_fitness(genome, self.scenario)

    def repair(self, genome: np.ndarray) -> np.ndarray:
        return simulate_soc_repair(genome, self.scenario.battery)[0]

    def seed_solutions(self) -> list[np.ndarray]:
        return [deterministic_schedule(self.scenario)]

    def describe(self, genome: np.ndarray) -> dict[str, Any]:
        bill = bsop_bill(genome, self.scenario)
        return {
            "schedule": [float(v) for v in self.repair(genome)],
            "et": bill.et,
            "pt": bill.pt,
            "total": bill.total,
        }


def bill_report(scenario: MicroGridScenario, schedule: np.ndarray) -> dict[str, float]:
    """PT, ET, total and improvement over running without a battery."""
    bill = bsop_bill(schedule, scenario)
    baseline = bsop_bill(np.zeros(HOURS), scenario).total
    improvement = 100.0 * (baseline - bill.total) / baseline if baseline > 0 else 0.0
    return {"pt": bill.pt, "et": bill.et, "total": bill.total, "improvement_pct": improvement}
