from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, fields, replace
from typing import TYPE_CHECKING, Any

from reefopt.core.errors import ConfigError

if TYPE_CHECKING:
    from reefopt.substrates.layers import SubstrateConfig


@dataclass(frozen=True)
class RunParams:
    """Engine parameters of one CRO-SL run.

    Defaults follow the TMD experiments (reef 120, 97% broadcast spawning,
    3 settlement attempts, 15% depredation fraction at 10% probability,
    1000 iterations, no budding, no regeneration).
    """

    substrates: tuple[SubstrateConfig, ...]
    reef_size: int = 120
    rho0: float = 0.6
    pb: float = 0.97
    kappa: int = 3
    fa: float = 0.05
    budding_enabled: bool = False
    fd: float = 0.15
    pd: float = 0.10
    iterations: int = 1000
    stagnation_window: int | None = None
    seed: int = 0
    # initialization: share of non-seed occupants perturbed from the first seed
    perturb_fraction: float = 0.5
    # perturbation sigma as a fraction of each gene's range
    perturb_sigma: float = 0.1

    def __post_init__(self) -> None:
        self.validate()

    @property
    def n_substrates(self) -> int:
        return len(self.substrates)

    def validate(self) -> None:
        if not self.substrates:
            raise ConfigError("engine: at least one substrate is required")
        if self.reef_size < 1:
            raise ConfigError(f"engine.reef_size must be >= 1, got {self.reef_size}")
        if self.reef_size % self.n_substrates:
            raise ConfigError(
                f"engine.reef_size {self.reef_size} is not divisible by "
                f"{self.n_substrates} substrates"
            )
        if not 0.0 < self.rho0 < 1.0:
            raise ConfigError(f"engine.rho0 must be in (0, 1), got {self.rho0}")
        for name in ("pb", "fa", "fd", "pd", "perturb_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"engine.{name} must be in [0, 1], got {value}")
        if self.fa + self.fd > 1.0:
            raise ConfigError(
                f"engine.fa + engine.fd must be <= 1, got {self.fa} + {self.fd}"
            )
        if self.kappa < 1:
            raise ConfigError(f"engine.kappa must be >= 1, got {self.kappa}")
        if self.iterations < 0:
            raise ConfigError(f"engine.iterations must be >= 0, got {self.iterations}")
        if self.stagnation_window is not None and self.stagnation_window < 1:
            raise ConfigError(
                f"engine.stagnation_window must be >= 1 or null, got {self.stagnation_window}"
            )
        if self.perturb_sigma < 0:
            raise ConfigError(
                f"engine.perturb_sigma must be >= 0, got {self.perturb_sigma}"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"engine.seed must be an unsigned 64-bit integer, got {self.seed}")
        names = [s.name for s in self.substrates]
        if len(set(names)) != len(names):
            raise ConfigError(f"substrates: names must be unique, got {names}")

    @property
    def occupied_at_start(self) -> int:
        """round(rho0 * P), rounding halves up."""
        return int(self.rho0 * self.reef_size + 0.5)

    def to_dict(self) -> dict[str, Any]:
        data = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "substrates"}
        data["substrates"] = [s.to_dict() for s in self.substrates]
        return data

    def digest(self) -> str:
        """Short stable hash of every parameter except the seed."""
        data = self.to_dict()
        data.pop("seed")
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def with_overrides(self, **changes: Any) -> RunParams:
        return replace(self, **changes)
