"""Micro-grid scenario: weekly profiles, battery limits and the 3-period tariff."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from reefopt.core.errors import ConfigError

log = logging.getLogger(__name__)

HOURS = 168
PROFILE_COLUMNS = ("hour", "L1", "L2", "W", "F")

# Spanish 3.1 access tariff
DEFAULT_ALPHA = (59.1735, 36.4907, 8.3677)  # euro / kW / year
DEFAULT_BETA = (0.1044496, 0.089868, 0.065655)  # euro / kWh
DEFAULT_HP = (72.0, 66.0, 58.0)  # kW
# hour of day -> period index (0 = P1, 1 = P2, 2 = P3)
DEFAULT_CALENDAR = tuple(
    0 if 10 <= h < 14 else 1 if 8 <= h < 10 or h >= 14 else 2 for h in range(24)
)
PERIOD_HOURS = (4, 12, 8)


def _check_fields(raw: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


@dataclass(frozen=True)
class BatterySpec:
    capacity_kwh: float = 300.0
    soc_min_fraction: float = 0.20
    soc_initial_fraction: float = 0.20
    p_max_charge_kw: float = 50.0
    p_max_discharge_kw: float = 50.0

    def __post_init__(self) -> None:
        if self.capacity_kwh <= 0:
            raise ConfigError(f"battery.capacity_kwh must be > 0, got {self.capacity_kwh}")
        if not 0.0 <= self.soc_min_fraction < 1.0:
            raise ConfigError(
                f"battery.soc_min_fraction must be in [0, 1), got {self.soc_min_fraction}"
            )
        if not self.soc_min_fraction <= self.soc_initial_fraction <= 1.0:
            raise ConfigError(
                "battery.soc_initial_fraction must lie between soc_min_fraction and 1, "
                f"got {self.soc_initial_fraction}"
            )
        if self.p_max_charge_kw <= 0 or self.p_max_discharge_kw <= 0:
            raise ConfigError("battery power limits must be > 0")

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> BatterySpec:
        _check_fields(raw, {f.name for f in fields(cls)}, "battery")
        return cls(**{k: float(v) for k, v in raw.items()})

    @property
    def soc_min_kwh(self) -> float:
        return self.soc_min_fraction * self.capacity_kwh

    @property
    def soc_initial_kwh(self) -> float:
        return self.soc_initial_fraction * self.capacity_kwh


@dataclass(frozen=True)
class Tariff:
    alpha: tuple[float, ...] = DEFAULT_ALPHA
    beta: tuple[float, ...] = DEFAULT_BETA
    hp: tuple[float, ...] = DEFAULT_HP
    calendar: tuple[int, ...] = DEFAULT_CALENDAR
    proration_weeks: float = 52.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "hp"):
            values = getattr(self, name)
            if len(values) != 3 or any(v < 0 for v in values):
                raise ConfigError(f"tariff.{name} needs 3 non-negative values, got {values}")
        if len(self.calendar) != 24:
            raise ConfigError(f"tariff.calendar needs 24 hourly entries, got {len(self.calendar)}")
        counts = tuple(self.calendar.count(p) for p in range(3))
        if counts != PERIOD_HOURS:
            raise ConfigError(
                f"tariff.calendar must give P1/P2/P3 4/12/8 hours, got {'/'.join(map(str, counts))}"
            )
        if self.proration_weeks <= 0:
            raise ConfigError(f"tariff.proration_weeks must be > 0, got {self.proration_weeks}")

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> Tariff:
        """Build from a config block; ``calendar`` lists the period (1-3) of each hour."""
        _check_fields(raw, {f.name for f in fields(cls)}, "tariff")
        kwargs: dict[str, Any] = {}
        for name in ("alpha", "beta", "hp"):
            if name in raw:
                kwargs[name] = tuple(float(v) for v in raw[name])
        if "calendar" in raw:
            periods = raw["calendar"]
            if any(p not in (1, 2, 3) for p in periods):
                raise ConfigError(f"tariff.calendar entries must be 1, 2 or 3, got {periods}")
            kwargs["calendar"] = tuple(int(p) - 1 for p in periods)
        if "proration_weeks" in raw:
            kwargs["proration_weeks"] = float(raw["proration_weeks"])
        return cls(**kwargs)

    def period_of_hour(self) -> np.ndarray:
        """Period index of every hour of the week."""
        return np.tile(np.asarray(self.calendar, dtype=int), HOURS // 24)


@dataclass(frozen=True)
class MicroGridScenario:
    """Hourly kW profiles of one week: two loads, wind and solar generation."""

    l1: np.ndarray
    l2: np.ndarray
    w: np.ndarray
    f: np.ndarray
    battery: BatterySpec = field(default_factory=BatterySpec)
    tariff: Tariff = field(default_factory=Tariff)
    name: str = ""

    def __post_init__(self) -> None:
        for label, profile in (("L1", self.l1), ("L2", self.l2), ("W", self.w), ("F", self.f)):
            if np.shape(profile) != (HOURS,):
                raise ConfigError(f"Profile {label} must have {HOURS} hourly values, got {np.size(profile)}")
            if np.any(~np.isfinite(profile)) or np.any(np.asarray(profile) < 0):
                raise ConfigError(f"Profile {label} must be finite and non-negative")

    @property
    def load(self) -> np.ndarray:
        return self.l1 + self.l2

    @property
    def generation(self) -> np.ndarray:
        return self.w + self.f

    @property
    def net_load(self) -> np.ndarray:
        """Grid exchange without battery: L1 + L2 - F - W."""
        return self.load - self.generation

    def with_battery(self, battery: BatterySpec) -> MicroGridScenario:
        return MicroGridScenario(self.l1, self.l2, self.w, self.f, battery, self.tariff, self.name)


def load_profiles(
    path: str | Path,
    battery: BatterySpec | None = None,
    tariff: Tariff | None = None,
) -> MicroGridScenario:
    """Read a 168-row ``hour,L1,L2,W,F`` CSV.

    Raises
    ------
    FileNotFoundError:
        If *path* does not exist.
    ConfigError:
        On a wrong header, row count, hour index or a negative value; the
        message names the offending data row.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Scenario profiles not found: {path}")

    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if tuple(header) != PROFILE_COLUMNS:
            raise ConfigError(f"{path}: expected header {','.join(PROFILE_COLUMNS)}, got {','.join(header)}")
        rows = [row for row in reader if any(cell.strip() for cell in row)]

    if len(rows) != HOURS:
        raise ConfigError(f"{path}: expected {HOURS} data rows, got {len(rows)}")

    data = np.empty((HOURS, 4))
    for k, row in enumerate(rows):
        row_no = k + 1
        if len(row) != len(PROFILE_COLUMNS):
            raise ConfigError(f"{path}: row {row_no}: expected {len(PROFILE_COLUMNS)} columns")
        try:
            hour = int(row[0])
            values = [float(cell) for cell in row[1:]]
        except ValueError as exc:
            raise ConfigError(f"{path}: row {row_no}: {exc}") from exc
        if hour != k:
            raise ConfigError(f"{path}: row {row_no}: expected hour {k}, got {hour}")
        for column, value in zip(PROFILE_COLUMNS[1:], values):
            if not np.isfinite(value) or value < 0:
                raise ConfigError(f"{path}: row {row_no}: {column} must be non-negative, got {value}")
        data[k] = values

    log.debug("Loaded scenario profiles from %s", path)
    return MicroGridScenario(
        l1=data[:, 0],
        l2=data[:, 1],
        w=data[:, 2],
        f=data[:, 3],
        battery=battery or BatterySpec(),
        tariff=tariff or Tariff(),
        name=path.stem,
    )


def write_profiles(scenario: MicroGridScenario, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PROFILE_COLUMNS)
        for t in range(HOURS):
            writer.writerow(
                [t, *(format(float(p[t]), ".6f") for p in (scenario.l1, scenario.l2, scenario.w, scenario.f))]
            )
    return path


def synth_profiles(
    seed: int,
    battery: BatterySpec | None = None,
    tariff: Tariff | None = None,
) -> MicroGridScenario:
    """Seed-deterministic synthetic week.

    L1 is a residential double-hump daily sinusoid, L2 an industrial
    working-hours load that drops at the weekend, F a solar bell curve
    scaled by a daily clearness factor and W an AR(1) wind series.
    """
    rng = np.random.default_rng(seed)
    hours = np.arange(HOURS)
    hod = hours % 24
    day = hours // 24

    residential = (
        18.0
        + 8.0 * np.sin(2 * np.pi * (hod - 7) / 24)
        + 6.0 * np.exp(-0.5 * ((hod - 21) / 2.0) ** 2)
    )
    l1 = residential * (1 + 0.05 * rng.standard_normal(HOURS))

    weekday = day < 5
    working = (hod >= 7) & (hod < 19)
    industrial = np.where(working, 34.0 + 8.0 * np.sin(np.pi * (hod - 7) / 12), 12.0)
    industrial = np.where(weekday, industrial, 0.5 * industrial)
    l2 = industrial * (1 + 0.05 * rng.standard_normal(HOURS))

    clearness = rng.uniform(0.4, 1.0, size=HOURS // 24)
    solar = 70.0 * np.exp(-0.5 * ((hod - 13) / 2.5) ** 2)
    solar = np.where((hod >= 6) & (hod <= 20), solar, 0.0)
    f = solar * clearness[day]

    w = np.empty(HOURS)
    level = 12.0
    for t in range(HOURS):
        level = 12.0 + 0.9 * (level - 12.0) + 3.0 * rng.standard_normal()
        w[t] = level

    return MicroGridScenario(
        l1=np.clip(l1, 0.0, None),
        l2=np.clip(l2, 0.0, None),
        w=np.clip(w, 0.0, None),
        f=np.clip(f, 0.0, None),
        battery=battery or BatterySpec(),
        tariff=tariff or Tariff(),
        name=f"synthetic-{seed}",
    )
