"""Reflection-coefficient (S11) objective of a 2.4 GHz band antenna.

The score rewards in-band samples under -10 dB plus the depth of the mean
and the minimum of the in-band trace; the engine minimises ``-score``.
The electromagnetic simulator is not part of this package: traces come from
CSV files or from a single-resonator surrogate.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from reefopt.core.errors import ConfigError
from reefopt.engine.encoding import EncodingSpec, GeneSpec
from reefopt.engine.problem import Problem

log = logging.getLogger(__name__)

WINDOW_MHZ = (2400.0, 2500.0)
MATCH_THRESHOLD_DB = -10.0
WEIGHT_COUNT, WEIGHT_MEAN, WEIGHT_MIN = 0.8, 0.1, 0.1
TRACE_COLUMNS = ("freq_mhz", "s11_db")
REFERENCE_OHM = 50.0


@dataclass(frozen=True)
class S11Trace:
    freq_mhz: np.ndarray
    s11_db: np.ndarray

    def __post_init__(self) -> None:
        if len(self.freq_mhz) != len(self.s11_db):
            raise ConfigError(
                f"S11 trace columns differ in length: {len(self.freq_mhz)} vs {len(self.s11_db)}"
            )
        if len(self.freq_mhz) > 1 and np.any(np.diff(self.freq_mhz) <= 0):
            raise ConfigError("S11 trace frequencies must be strictly ascending")

    def window(self, window: tuple[float, float] = WINDOW_MHZ) -> np.ndarray:
        lo, hi = window
        mask = (self.freq_mhz >= lo) & (self.freq_mhz <= hi)
        return self.s11_db[mask]


def antenna_fitness(trace: S11Trace, window: tuple[float, float] = WINDOW_MHZ) -> float:
    """0.8 N + 0.1 |mean| + 0.1 |min| over the in-window samples, N counting samples under -10 dB.

    Raises
    ------
    ConfigError:
        If no sample falls inside *window*.
    """
    values = trace.window(window)
    if not len(values):
        raise ConfigError(f"S11 trace has no samples in {window[0]:g}-{window[1]:g} MHz")
    n_matched = int(np.count_nonzero(values < MATCH_THRESHOLD_DB))
    return (
        WEIGHT_COUNT * n_matched
        + WEIGHT_MEAN * abs(float(np.mean(values)))
        + WEIGHT_MIN * abs(float(np.min(values)))
    )


def load_trace(path: str | Path) -> S11Trace:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"S11 trace not found: {path}")
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if tuple(header) != TRACE_COLUMNS:
            raise ConfigError(f"{path}: expected header {','.join(TRACE_COLUMNS)}, got {','.join(header)}")
        freq, s11 = [], []
        for row_no, row in enumerate(reader, start=1):
            if not any(cell.strip() for cell in row):
                continue
            try:
                f, s = (float(cell) for cell in row)
            except ValueError as exc:
                raise ConfigError(f"{path}: row {row_no}: {exc}") from exc
            freq.append(f)
            s11.append(s)
    return S11Trace(np.asarray(freq), np.asarray(s11))


def frequency_axis(
    start_mhz: float = 2300.0, stop_mhz: float = 2600.0, step_mhz: float = 2.0
) -> np.ndarray:
    n = int(round((stop_mhz - start_mhz) / step_mhz)) + 1
    return np.linspace(start_mhz, stop_mhz, n)


def synth_trace(
    f0_mhz: float,
    q: float,
    r_ohm: float,
    freq_mhz: np.ndarray | None = None,
) -> S11Trace:
    """S11 of a series RLC resonator (resonance *f0_mhz*, quality *q*, loss *r_ohm*) on a 50 ohm line."""
    freq = frequency_axis() if freq_mhz is None else np.asarray(freq_mhz, dtype=float)
    detune = freq / f0_mhz - f0_mhz / freq
    z = r_ohm * (1.0 + 1j * q * detune)
    gamma = (z - REFERENCE_OHM) / (z + REFERENCE_OHM)
    s11 = 20.0 * np.log10(np.maximum(np.abs(gamma), 1e-12))
    return S11Trace(freq, s11)


class AntennaTraceProblem(Problem):
    """Tune the surrogate resonator's f0 (MHz), Q and R (ohm) to maximise the S11 score."""

    kind = "antenna_trace"

    def __init__(
        self,
        f0_bounds: tuple[float, float] = (2200.0, 2700.0),
        q_bounds: tuple[float, float] = (1.0, 60.0),
        r_bounds: tuple[float, float] = (5.0, 200.0),
        freq_mhz: np.ndarray | None = None,
    ) -> None:
        super().__init__(
            EncodingSpec(
                (
                    GeneSpec("real", *f0_bounds, group=0),
                    GeneSpec("real", *q_bounds, group=1),
                    GeneSpec("real", *r_bounds, group=2),
                )
            )
        )
        self.freq_mhz = frequency_axis() if freq_mhz is None else np.asarray(freq_mhz)

    def trace(self, genome: np.ndarray) -> S11Trace:
        f0, q, r = (float(v) for v in genome)
        return synth_trace(f0, q, r, self.freq_mhz)

    def evaluate(self, genome: np.ndarray) -> float:
        return -antenna_fitness(self.trace(genome))

    def describe(self, genome: np.ndarray) -> dict[str, Any]:
        f0, q, r = (float(v) for v in genome)
        return {"f0_mhz": f0, "q": q, "r_ohm": r, "score": antenna_fitness(self.trace(genome))}
