from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from reefopt.engine.encoding import EncodingSpec


@dataclass
class Coral:
    """One candidate solution. Fitness is a cost: lower is better."""

    genome: np.ndarray
    fitness: float = float("inf")
    evaluated: bool = False

    def copy(self) -> Coral:
        return Coral(self.genome.copy(), self.fitness, self.evaluated)


@dataclass
class Reef:
    """Slot-partitioned population stored as a P x L genome matrix plus occupancy.

    Slot ``i`` belongs to substrate ``substrate_of_slot[i]``; substrates own
    contiguous, equal-size slot ranges.
    """

    encoding: EncodingSpec
    genomes: np.ndarray
    fitness: np.ndarray
    occupancy: np.ndarray
    substrate_of_slot: np.ndarray
    best_ever: Coral | None = None
    stagnation: int = 0
    provenance: list[str] = field(default_factory=list)

    @classmethod
    def empty(cls, size: int, n_substrates: int, encoding: EncodingSpec) -> Reef:
        if n_substrates < 1 or size % n_substrates:
            raise ValueError(
                f"Reef size {size} is not divisible by {n_substrates} substrates"
            )
        per_substrate = size // n_substrates
        return cls(
            encoding=encoding,
            genomes=np.zeros((size, len(encoding))),
            fitness=np.full(size, np.inf),
            occupancy=np.zeros(size, dtype=bool),
            substrate_of_slot=np.arange(size) // per_substrate,
            provenance=[""] * size,
        )

    # -----------------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.occupancy)

    @property
    def n_occupied(self) -> int:
        return int(self.occupancy.sum())

    def occupied_slots(self) -> np.ndarray:
        return np.flatnonzero(self.occupancy)

    def coral(self, slot: int) -> Coral | None:
        if not self.occupancy[slot]:
            return None
        return Coral(self.genomes[slot].copy(), float(self.fitness[slot]), True)

    def place(self, slot: int, coral: Coral, provenance: str = "") -> None:
        self.genomes[slot] = coral.genome
        self.fitness[slot] = coral.fitness
        self.occupancy[slot] = True
        self.provenance[slot] = provenance

    def free(self, slot: int) -> None:
        self.occupancy[slot] = False
        self.fitness[slot] = np.inf
        self.provenance[slot] = ""

    def contains_genome(self, genome: np.ndarray) -> bool:
        """True when an occupied slot holds a genome equal to *genome*."""
        if not self.occupancy.any():
            return False
        rows = self.genomes[self.occupancy]
        return bool(self.encoding.equal_rows(rows, genome).any())

    def best_slot(self) -> int | None:
        if not self.occupancy.any():
            return None
        masked = np.where(self.occupancy, self.fitness, np.inf)
        return int(np.argmin(masked))

    def update_best(self) -> bool:
        """Refresh ``best_ever`` from the occupants; True on strict improvement."""
        slot = self.best_slot()
        if slot is None:
            return False
        if self.best_ever is None or self.fitness[slot] < self.best_ever.fitness:
            self.best_ever = self.coral(slot)
            return True
        return False
