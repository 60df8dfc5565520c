"""Battery scheduling on a micro-grid under a 3-period time-of-use tariff.

A genome is one week of hourly battery powers (kW, positive charges).
The cost is the weekly electricity bill: energy term plus the prorated
banded power term.
"""

from __future__ import annotations

from .battery import deterministic_schedule, simulate_soc_repair
from .billing import Bill, billing, invoiced_power
from .problem import BsopProblem, bill_report, bsop_bill, bsop_fitness, grid_exchange
from .scenario import (
    HOURS,
    BatterySpec,
    MicroGridScenario,
    Tariff,
    load_profiles,
    synth_profiles,
    write_profiles,
)

__all__ = [
    "deterministic_schedule",
    "simulate_soc_repair",
    "Bill",
    "billing",
    "invoiced_power",
    "BsopProblem",
    "bill_report",
    "bsop_bill",
    "bsop_fitness",
    "grid_exchange",
    "HOURS",
    "BatterySpec",
    "MicroGridScenario",
    "Tariff",
    "load_profiles",
    "synth_profiles",
    "write_profiles",
]
