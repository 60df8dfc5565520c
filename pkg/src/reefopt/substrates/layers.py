"""Substrate layer configuration and the per-kind spawning strategies."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar, Mapping, Sequence

import numpy as np

from reefopt.core.errors import ConfigError
from reefopt.engine.encoding import EncodingSpec
from reefopt.substrates.attractor import sabm_mutate
from reefopt.substrates.operators import (
    crossover_2p,
    crossover_mp,
    de_mutate,
    gaussian_mutate,
    hs_mutate,
    pick_de_partners,
)
from reefopt.substrates.schedules import LinearSchedule, Number

log = logging.getLogger(__name__)

SCALE_MODES = ("absolute", "range")

# kind -> {param: default}; sigma None selects DEFAULT_SIGMA
_PARAM_DEFAULTS: dict[str, dict[str, Any]] = {
    "HS": {"hmcr": 0.9, "par": 0.2, "delta": 0.01, "delta_mode": "range"},
    "DE": {"f": 0.6},
    "TwoPx": {},
    "MPx": {"m": 3},
    "GM": {"sigma": None, "sigma_mode": "range"},
    "SAbM": {"sigma": None, "sigma_mode": "range"},
}

_SCHEDULABLE: dict[str, frozenset[str]] = {
    "HS": frozenset({"hmcr", "par", "delta"}),
    "DE": frozenset({"f"}),
    "TwoPx": frozenset(),
    "MPx": frozenset(),
    "GM": frozenset({"sigma"}),
    "SAbM": frozenset({"sigma"}),
}

# GM default and SAbM fallback: 0.2 -> 0.02 of each gene's range
DEFAULT_SIGMA = LinearSchedule(0.2, 0.02)

SUBSTRATE_KINDS = tuple(_PARAM_DEFAULTS)
_CONFIG_FIELDS = {"kind", "name", "params", "schedules"}


@dataclass(frozen=True)
class SubstrateConfig:
    """One substrate layer: its operator kind, display name and parameters.

    ``schedules`` override same-named ``params`` with a value that moves
    linearly over the run.
    """

    kind: str
    name: str = ""
    params: Mapping[str, Any] = field(default_factory=dict)
    schedules: Mapping[str, LinearSchedule] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in _PARAM_DEFAULTS:
            raise ConfigError(
                f"Unknown substrate kind {self.kind!r}; expected one of {', '.join(SUBSTRATE_KINDS)}"
            )
        if not self.name:
            object.__setattr__(self, "name", self.kind.lower())
        self._validate()

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any], where: str = "substrates") -> SubstrateConfig:
        if not isinstance(raw, Mapping):
            raise ConfigError(f"{where}: expected an object, got {type(raw).__name__}")
        unknown = set(raw) - _CONFIG_FIELDS
        if unknown:
            raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
        if "kind" not in raw:
            raise ConfigError(f"{where}: missing 'kind'")
        params = raw.get("params", {})
        schedules_raw = raw.get("schedules", {})
        if not isinstance(params, Mapping) or not isinstance(schedules_raw, Mapping):
            raise ConfigError(f"{where}: 'params' and 'schedules' must be objects")
        schedules = {
            key: LinearSchedule.parse(value, f"{where}.schedules.{key}")
            for key, value in schedules_raw.items()
        }
        name = raw.get("name", "")
        if not isinstance(name, str):
            raise ConfigError(f"{where}.name: expected a string, got {name!r}")
        try:
            return cls(kind=raw["kind"], name=name, params=dict(params), schedules=schedules)
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from exc

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "name": self.name,
            "params": {k: _plain(v) for k, v in self.params.items()},
            "schedules": {
                k: [_plain(s.start), _plain(s.end)] for k, s in self.schedules.items()
            },
        }

    def value(self, key: str, iteration: int = 0, total_iterations: int = 1) -> Any:
        """Current value of *key*: the schedule point, the fixed param, or the default."""
        if key in self.schedules:
            return self.schedules[key].at(iteration, total_iterations)
        if key in self.params:
            return self.params[key]
        return _PARAM_DEFAULTS[self.kind][key]

    # -----------------------------------------------------------------------

    def _validate(self) -> None:
        allowed = set(_PARAM_DEFAULTS[self.kind])
        unknown = set(self.params) - allowed
        if unknown:
            raise ConfigError(f"{self.kind}: unknown params {sorted(unknown)}")
        not_schedulable = set(self.schedules) - _SCHEDULABLE[self.kind]
        if not_schedulable:
            raise ConfigError(f"{self.kind}: params {sorted(not_schedulable)} cannot be scheduled")

        for key in ("hmcr", "par"):
            for v in self.values_of(key):
                if not _is_numeric(v) or np.ndim(v) != 0 or not 0.0 <= float(v) <= 1.0:
                    raise ConfigError(f"{self.kind}.{key} must lie in [0, 1], got {v!r}")
        for key in ("delta", "sigma"):
            for v in self.values_of(key):
                if v is None:
                    continue
                arr = np.asarray(v, dtype=float) if _is_numeric(v) else None
                if arr is None or not np.all(np.isfinite(arr)) or np.any(arr < 0):
                    raise ConfigError(f"{self.kind}.{key} must be non-negative numbers, got {v!r}")
        for v in self.values_of("f"):
            if not _is_numeric(v) or np.ndim(v) != 0 or not np.isfinite(float(v)):
                raise ConfigError(f"{self.kind}.f must be a finite number, got {v!r}")
        for key in ("delta_mode", "sigma_mode"):
            if key in self.params and self.params[key] not in SCALE_MODES:
                raise ConfigError(
                    f"{self.kind}.{key} must be one of {SCALE_MODES}, got {self.params[key]!r}"
                )
        if self.kind == "MPx":
            m = self.params.get("m", 3)
            if isinstance(m, bool) or not isinstance(m, int) or m < 1:
                raise ConfigError(f"MPx.m must be an integer >= 1, got {m!r}")

    def values_of(self, key: str) -> list[Any]:
        values = []
        if key in self.params:
            values.append(self.params[key])
        if key in self.schedules:
            values.extend([self.schedules[key].start, self.schedules[key].end])
        return values


def _is_numeric(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, (int, float, np.ndarray)):
        return True
    return (
        isinstance(value, Sequence)
        and not isinstance(value, str)
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    )


def _plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


# ---------------------------------------------------------------------------
# Spawning strategies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpawnContext:
    """Read-only view of the reef handed to every substrate in one iteration."""

    population: np.ndarray
    encoding: EncodingSpec
    iteration: int = 0
    total_iterations: int = 1


class Substrate(ABC):
    """A substrate turns one occupied coral into larvae.

    ``spawn`` returns None when the operator cannot act on the current reef;
    the engine then broods that coral instead.
    """

    kind: ClassVar[str] = ""

    def __init__(self, config: SubstrateConfig, index: int) -> None:
        self.config = config
        self.index = index

    @property
    def name(self) -> str:
        return self.config.name

    def check(self, encoding: EncodingSpec) -> None:
        """Reject parameters that do not fit *encoding*."""

    @abstractmethod
    def spawn(
        self, coral_index: int, ctx: SpawnContext, rng: np.random.Generator
    ) -> list[np.ndarray] | None: ...

    def _value(self, key: str, ctx: SpawnContext) -> Any:
        return self.config.value(key, ctx.iteration, ctx.total_iterations)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"


def _per_group(value: Number, encoding: EncodingSpec, key: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(encoding.n_groups, float(arr))
    if arr.shape != (encoding.n_groups,):
        raise ConfigError(
            f"{key} has {arr.size} entries but the encoding has {encoding.n_groups} gene groups"
        )
    return arr


def _group_span(encoding: EncodingSpec) -> np.ndarray:
    spans = np.zeros(encoding.n_groups)
    np.maximum.at(spans, encoding.groups, encoding.span)
    return spans


def sigma_by_gene(
    value: Number, mode: str, encoding: EncodingSpec, key: str = "sigma"
) -> np.ndarray:
    """Expand a scalar or per-group sigma to one value per gene.

    In ``range`` mode the value is a fraction of each gene's range.
    """
    per_gene = _per_group(value, encoding, key)[encoding.groups]
    if mode == "range":
        return per_gene * encoding.span
    return per_gene


class HarmonySearch(Substrate):
    kind = "HS"

    def check(self, encoding: EncodingSpec) -> None:
        for v in self.config.values_of("delta") or [self.config.value("delta")]:
            _per_group(v, encoding, f"{self.name}.delta")

    def delta_by_group(self, ctx: SpawnContext) -> np.ndarray:
        delta = _per_group(self._value("delta", ctx), ctx.encoding, f"{self.name}.delta")
        if self.config.value("delta_mode") == "range":
            return delta * _group_span(ctx.encoding)
        return delta

    def spawn(self, coral_index, ctx, rng):
        return [
            hs_mutate(
                ctx.population[coral_index],
                ctx.population,
                float(self._value("hmcr", ctx)),
                float(self._value("par", ctx)),
                self.delta_by_group(ctx),
                ctx.encoding,
                rng,
            )
        ]


class DifferentialEvolution(Substrate):
    kind = "DE"

    def spawn(self, coral_index, ctx, rng):
        partners = pick_de_partners(coral_index, len(ctx.population), rng)
        if partners is None:
            return None
        second, third = partners
        return [
            de_mutate(
                ctx.population[coral_index],
                ctx.population[second],
                ctx.population[third],
                float(self._value("f", ctx)),
                ctx.encoding,
            )
        ]


class _Crossover(Substrate):
    def partner(self, coral_index: int, ctx: SpawnContext, rng: np.random.Generator) -> int | None:
        size = len(ctx.population)
        if size < 2:
            return None
        other = int(rng.integers(0, size - 1))
        return other + 1 if other >= coral_index else other


class TwoPointCrossover(_Crossover):
    kind = "TwoPx"

    def spawn(self, coral_index, ctx, rng):
        other = self.partner(coral_index, ctx, rng)
        if other is None:
            return None
        return list(crossover_2p(ctx.population[coral_index], ctx.population[other], rng))


class MultiPointCrossover(_Crossover):
    kind = "MPx"

    @property
    def m_points(self) -> int:
        return int(self.config.value("m"))

    def check(self, encoding: EncodingSpec) -> None:
        if self.m_points >= len(encoding):
            raise ConfigError(
                f"{self.name}: MPx needs m < genome length {len(encoding)}, got m={self.m_points}"
            )

    def spawn(self, coral_index, ctx, rng):
        other = self.partner(coral_index, ctx, rng)
        if other is None:
            return None
        return list(
            crossover_mp(ctx.population[coral_index], ctx.population[other], self.m_points, rng)
        )


class GaussianMutation(Substrate):
    kind = "GM"

    def check(self, encoding: EncodingSpec) -> None:
        for v in self.config.values_of("sigma"):
            _per_group(v, encoding, f"{self.name}.sigma")

    def sigma(self, ctx: SpawnContext) -> np.ndarray:
        if "sigma" in self.config.schedules or self.config.params.get("sigma") is not None:
            value = self._value("sigma", ctx)
            mode = self.config.value("sigma_mode")
        else:
            value = DEFAULT_SIGMA.at(ctx.iteration, ctx.total_iterations)
            mode = "range"
        return sigma_by_gene(value, mode, ctx.encoding, f"{self.name}.sigma")

    def spawn(self, coral_index, ctx, rng):
        return [gaussian_mutate(ctx.population[coral_index], self.sigma(ctx), ctx.encoding, rng)]


class StrangeAttractorMutation(GaussianMutation):
    kind = "SAbM"

    def spawn(self, coral_index, ctx, rng):
        return [
            sabm_mutate(ctx.population[coral_index], ctx.encoding, rng, fallback_sigma=self.sigma(ctx))
        ]


_LAYER_CLASSES: dict[str, type[Substrate]] = {
    cls.kind: cls
    for cls in (
        HarmonySearch,
        DifferentialEvolution,
        TwoPointCrossover,
        MultiPointCrossover,
        GaussianMutation,
        StrangeAttractorMutation,
    )
}


def build_layers(configs: Sequence[SubstrateConfig], encoding: EncodingSpec) -> list[Substrate]:
    """Instantiate one strategy per config and check it against *encoding*."""
    layers = []
    for index, config in enumerate(configs):
        layer = _LAYER_CLASSES[config.kind](config, index)
        layer.check(encoding)
        layers.append(layer)
    log.debug("Substrate layers: %s", ", ".join(layer.name for layer in layers))
    return layers
