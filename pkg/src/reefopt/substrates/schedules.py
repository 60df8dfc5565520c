from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from reefopt.core.errors import ConfigError

Number = float | np.ndarray


def schedule_value(start: Number, end: Number, iteration: int, total_iterations: int) -> Number:
    """Linear interpolation from *start* (iteration 0) to *end* (last iteration)."""
    if total_iterations < 1:
        raise ValueError(f"total_iterations must be >= 1, got {total_iterations}")
    if total_iterations == 1:
        return start
    fraction = iteration / (total_iterations - 1)
    return start + (end - start) * fraction


@dataclass(frozen=True)
class LinearSchedule:
    """A parameter that moves linearly between two endpoints over a run.

    Endpoints may be scalars or per-group vectors of equal length.
    """

    start: Number
    end: Number

    @classmethod
    def parse(cls, raw: object, where: str) -> LinearSchedule:
        if not isinstance(raw, Sequence) or isinstance(raw, str) or len(raw) != 2:
            raise ConfigError(f"{where}: schedule must be a [start, end] pair, got {raw!r}")
        start, end = (_as_number(v, where) for v in raw)
        if np.shape(start) != np.shape(end):
            raise ConfigError(f"{where}: schedule endpoints differ in shape")
        return cls(start, end)

    def at(self, iteration: int, total_iterations: int) -> Number:
        return schedule_value(self.start, self.end, iteration, total_iterations)


def _as_number(value: object, where: str) -> Number:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        number: Number = float(value)
    elif isinstance(value, Sequence) and not isinstance(value, str) and value:
        try:
            number = np.asarray([float(v) for v in value])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: expected numbers, got {value!r}") from exc
    else:
        raise ConfigError(f"{where}: expected a number or list of numbers, got {value!r}")
    if not np.all(np.isfinite(number)):
        raise ConfigError(f"{where}: values must be finite, got {value!r}")
    return number
