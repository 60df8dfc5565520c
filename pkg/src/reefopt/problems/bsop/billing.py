from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Tariff

BAND_LOW = 0.85
BAND_HIGH = 1.05


def invoiced_power(m_kw: float | np.ndarray, hp_kw: float | np.ndarray) -> float | np.ndarray:
    """Banded invoiced power around the hired power *hp_kw*.

    Below 0.85 HP the bill uses 0.85 HP, inside the closed band
    [0.85 HP, 1.05 HP] it uses HP, above it M + 2 (M - HP).
    """
    m = np.asarray(m_kw, dtype=float)
    hp = np.asarray(hp_kw, dtype=float)
    ip = np.where(
        m < BAND_LOW * hp,
        BAND_LOW * hp,
        np.where(m <= BAND_HIGH * hp, hp, m + 2.0 * (m - hp)),
    )
    return float(ip) if ip.ndim == 0 else ip


@dataclass(frozen=True)
class Bill:
    et: float
    pt: float
    energy_kwh: tuple[float, ...]
    max_kw: tuple[float, ...]
    invoiced_kw: tuple[float, ...]

    @property
    def total(self) -> float:
        return self.et + self.pt


def billing(p: np.ndarray, tariff: Tariff) -> Bill:
    """Weekly bill of the grid exchange *p* (kW, positive = consumption).

    Exported energy earns nothing; per-period maxima are floored at 0 and the
    annual power-term prices are prorated over ``tariff.proration_weeks``.
    """
    p = np.asarray(p, dtype=float)
    period = tariff.period_of_hour()[: len(p)]
    consumption = np.clip(p, 0.0, None)

    energy = np.zeros(3)
    np.add.at(energy, period, consumption)
    peaks = np.zeros(3)
    np.maximum.at(peaks, period, consumption)

    alpha = np.asarray(tariff.alpha)
    beta = np.asarray(tariff.beta)
    ip = invoiced_power(peaks, np.asarray(tariff.hp))
    et = float(beta @ energy)
    pt = float((alpha / tariff.proration_weeks) @ ip)
    return Bill(
        et=et,
        pt=pt,
        energy_kwh=tuple(float(v) for v in energy),
        max_kw=tuple(float(v) for v in peaks),
        invoiced_kw=tuple(float(v) for v in ip),
    )
