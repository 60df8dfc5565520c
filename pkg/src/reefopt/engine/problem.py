from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, ClassVar

import numpy as np

from reefopt.engine.encoding import EncodingSpec


class Problem(ABC):
    """Objective contract consumed by the engine.

    ``evaluate`` must be pure and deterministic and return a cost (lower is
    better). ``repair`` maps any in-bounds genome to a feasible one; the
    engine stores the repaired genome.
    """

    kind: ClassVar[str] = ""

    def __init__(self, encoding: EncodingSpec) -> None:
        self.encoding = encoding

    @abstractmethod
    def evaluate(self, genome: np.ndarray) -> float: ...

    def repair(self, genome: np.ndarray) -> np.ndarray:
        return genome

    def seed_solutions(self) -> list[np.ndarray]:
        return []

    def describe(self, genome: np.ndarray) -> dict[str, Any]:
        """Human-readable decoding of *genome* for run summaries."""
        return {"genome": [float(v) for v in genome]}


class SphereProblem(Problem):
    """sum(x**2): the sanity objective every competent EA drives below 1e-2."""

    kind = "sphere"

    def __init__(self, dimension: int = 10, lower: float = -5.0, upper: float = 5.0) -> None:
        super().__init__(EncodingSpec.uniform(dimension, lower, upper))

    def evaluate(self, genome: np.ndarray) -> float:
        return float(np.dot(genome, genome))
