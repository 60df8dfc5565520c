from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from reefopt.core.errors import ConfigError
from reefopt.engine.encoding import EncodingSpec, GeneSpec
from reefopt.engine.problem import Problem

from .building import BuildingSpec
from .frf import FrfGrid, FrfModel, to_db

log = logging.getLogger(__name__)

# gene group tags: mass, damping, frequency, position
GROUP_MASS, GROUP_DAMPING, GROUP_FREQUENCY, GROUP_FLOOR = 0, 1, 2, 3

SOLUTION_KEYS = ("omega", "xi", "mass", "floors")


@dataclass(frozen=True)
class TmdBounds:
    omega_max: float = 50.0
    xi_max: float = 0.3
    mass_max: float = 0.05

    def __post_init__(self) -> None:
        if min(self.omega_max, self.xi_max, self.mass_max) <= 0:
            raise ConfigError("tmd bounds must be positive")


@dataclass(frozen=True)
class TmdDesign:
    """M TMDs: natural frequencies (rad/s), damping ratios, masses (kg) and 1-based floors."""

    omega: np.ndarray
    xi: np.ndarray
    mass: np.ndarray
    floors: np.ndarray

    def __post_init__(self) -> None:
        sizes = {len(self.omega), len(self.xi), len(self.mass), len(self.floors)}
        if len(sizes) != 1:
            raise ConfigError(f"TMD design vectors differ in length: {sorted(sizes)}")
        if np.any(np.asarray(self.mass) < 0):
            raise ConfigError("TMD masses must be >= 0")

    @property
    def n_tmd(self) -> int:
        return len(self.omega)

    @classmethod
    def from_genome(cls, genome: np.ndarray) -> TmdDesign:
        """Decode ``[omega..., xi..., mass..., floor...]``."""
        genome = np.asarray(genome, dtype=float)
        if len(genome) % 4:
            raise ValueError(f"TMD genome length must be a multiple of 4, got {len(genome)}")
        omega, xi, mass, floors = np.split(genome, 4)
        return cls(omega, xi, mass, np.rint(floors).astype(int))

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> TmdDesign:
        unknown = set(raw) - set(SOLUTION_KEYS)
        missing = set(SOLUTION_KEYS) - set(raw)
        if unknown or missing:
            raise ConfigError(
                f"TMD solution needs keys {', '.join(SOLUTION_KEYS)}"
                f"{'; unknown ' + str(sorted(unknown)) if unknown else ''}"
                f"{'; missing ' + str(sorted(missing)) if missing else ''}"
            )
        return cls(
            omega=np.asarray(raw["omega"], dtype=float),
            xi=np.asarray(raw["xi"], dtype=float),
            mass=np.asarray(raw["mass"], dtype=float),
            floors=np.asarray(raw["floors"], dtype=int),
        )

    def to_genome(self) -> np.ndarray:
        return np.concatenate([self.omega, self.xi, self.mass, self.floors]).astype(float)

    def to_dict(self) -> dict[str, list]:
        return {
            "omega": [float(v) for v in self.omega],
            "xi": [float(v) for v in self.xi],
            "mass": [float(v) for v in self.mass],
            "floors": [int(v) for v in self.floors],
        }

    @classmethod
    def empty(cls) -> TmdDesign:
        """No TMDs at all."""
        return cls(np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(0, dtype=int))


def tmd_encoding(
    n_tmd: int,
    n_floors: int,
    bounds: TmdBounds,
    fixed_floors: Sequence[int] | None = None,
) -> EncodingSpec:
    """Gene layout of M TMDs; pinned floors become degenerate integer genes."""
    if fixed_floors is not None:
        if len(fixed_floors) != n_tmd:
            raise ConfigError(
                f"fixed_floors needs {n_tmd} entries, got {len(fixed_floors)}"
            )
        if any(not 1 <= int(f) <= n_floors for f in fixed_floors):
            raise ConfigError(f"fixed_floors must lie in 1..{n_floors}, got {list(fixed_floors)}")
    floor_genes = [
        GeneSpec("integer", float(f), float(f), GROUP_FLOOR)
        if fixed_floors is not None
        else GeneSpec("integer", 1.0, float(n_floors), GROUP_FLOOR)
        for f in (fixed_floors if fixed_floors is not None else range(n_tmd))
    ]
    return EncodingSpec.concat(
        [
            [GeneSpec("real", 0.0, bounds.omega_max, GROUP_FREQUENCY)] * n_tmd,
            [GeneSpec("real", 0.0, bounds.xi_max, GROUP_DAMPING)] * n_tmd,
            [GeneSpec("real", 0.0, bounds.mass_max, GROUP_MASS)] * n_tmd,
            floor_genes,
        ]
    )


def fitness_g(genome: np.ndarray, spec: BuildingSpec, grid: FrfGrid | None = None) -> float:
    """Largest closed-loop floor-acceleration magnitude (linear scale)."""
    return FrfModel(spec, grid).peak(TmdDesign.from_genome(genome))


class TmdProblem(Problem):
    """Choose frequency, damping, mass and floor of M TMDs to minimise the FRF infinity norm."""

    kind = "tmd"

    def __init__(
        self,
        building: BuildingSpec,
        n_tmd: int | None = None,
        bounds: TmdBounds | None = None,
        grid: FrfGrid | None = None,
        fixed_floors: Sequence[int] | None = None,
    ) -> None:
        self.building = building
        self.n_tmd = building.n_floors if n_tmd is None else n_tmd
        if self.n_tmd < 1:
            raise ConfigError(f"tmd.n_tmd must be >= 1, got {self.n_tmd}")
        self.bounds = bounds or TmdBounds()
        self.fixed_floors = tuple(int(f) for f in fixed_floors) if fixed_floors is not None else None
        super().__init__(tmd_encoding(self.n_tmd, building.n_floors, self.bounds, self.fixed_floors))
        self.model = FrfModel(building, grid)

    def decode(self, genome: np.ndarray) -> TmdDesign:
        return TmdDesign.from_genome(genome)

    def evaluate(self, genome: np.ndarray) -> float:
        return self.model.peak(self.decode(genome))

    def evaluate_design(self, design: TmdDesign) -> float:
        if np.any((design.floors < 1) | (design.floors > self.building.n_floors)):
            raise ConfigError(
                f"TMD floors must lie in 1..{self.building.n_floors}, got {design.floors.tolist()}"
            )
        return self.model.peak(design)

    def describe(self, genome: np.ndarray) -> dict[str, Any]:
        design = self.decode(genome)
        peak = self.model.peak(design)
        return {**design.to_dict(), "peak": peak, "peak_db": float(to_db(np.array(peak)))}
