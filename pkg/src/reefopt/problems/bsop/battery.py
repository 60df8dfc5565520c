from __future__ import annotations

import numpy as np

from .scenario import BatterySpec, MicroGridScenario


def simulate_soc_repair(b: np.ndarray, battery: BatterySpec) -> tuple[np.ndarray, np.ndarray]:
    """Forward hour-by-hour clamp of a battery schedule (kW, + charges).

    Each hour is first limited to the power range, then so the state of charge
    stays in [soc_min, capacity]. Returns the feasible schedule and the SOC
    trace in kWh (one point more than hours). Idempotent.
    """
    b = np.asarray(b, dtype=float)
    lo, hi = battery.soc_min_kwh, battery.capacity_kwh
    repaired = np.empty_like(b)
    soc = np.empty(len(b) + 1)
    level = battery.soc_initial_kwh
    soc[0] = level
    for t, power in enumerate(b):
        power = min(max(power, -battery.p_max_discharge_kw), battery.p_max_charge_kw)
        power = min(max(power, lo - level), hi - level)
        level += power
        repaired[t] = power
        soc[t + 1] = level
    return repaired, soc


def deterministic_schedule(scenario: MicroGridScenario) -> np.ndarray:
    """Greedy baseline: charge from every surplus, discharge to cover every deficit.

    Charging never exceeds the surplus and discharging never exports.
    """
    battery = scenario.battery
    lo, hi = battery.soc_min_kwh, battery.capacity_kwh
    level = battery.soc_initial_kwh
    net = scenario.net_load
    schedule = np.zeros(len(net))
    for t, demand in enumerate(net):
        if demand < 0:
            power = min(-demand, battery.p_max_charge_kw, hi - level)
        else:
            power = -min(demand, battery.p_max_discharge_kw, level - lo)
        schedule[t] = power
        level += power
    return schedule
