from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Sequence

import numpy as np

from reefopt.core.errors import ConfigError

GeneKind = Literal["real", "integer"]

# Absolute per-gene tolerance for "equal genome" on real genes.
DUPLICATE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GeneSpec:
    kind: GeneKind
    lower: float
    upper: float
    group: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("real", "integer"):
            raise ConfigError(f"Unknown gene kind {self.kind!r}")
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ConfigError(f"Gene bounds must be finite, got [{self.lower}, {self.upper}]")
        if self.lower > self.upper:
            raise ConfigError(f"Gene lower bound {self.lower} exceeds upper bound {self.upper}")
        if self.kind == "integer" and (
            float(self.lower) != int(self.lower) or float(self.upper) != int(self.upper)
        ):
            raise ConfigError(
                f"Integer gene needs integral bounds, got [{self.lower}, {self.upper}]"
            )
        if self.group < 0:
            raise ConfigError(f"Gene group must be >= 0, got {self.group}")


@dataclass(frozen=True)
class EncodingSpec:
    """Ordered gene layout shared by the engine, the substrates and the problems.

    Group tags select per-group operator parameters (e.g. the HS pitch
    adjustment step of the TMD problem) and must be contiguous from 0.
    """

    genes: tuple[GeneSpec, ...]

    def __post_init__(self) -> None:
        if not self.genes:
            raise ConfigError("Encoding must contain at least one gene")
        groups = sorted({g.group for g in self.genes})
        if groups != list(range(len(groups))):
            raise ConfigError(f"Gene groups must be contiguous from 0, got {groups}")

    @classmethod
    def uniform(
        cls, length: int, lower: float, upper: float, kind: GeneKind = "real"
    ) -> EncodingSpec:
        return cls(tuple(GeneSpec(kind, lower, upper) for _ in range(length)))

    @classmethod
    def concat(cls, blocks: Sequence[Sequence[GeneSpec]]) -> EncodingSpec:
        return cls(tuple(g for block in blocks for g in block))

    def __len__(self) -> int:
        return len(self.genes)

    @cached_property
    def lower(self) -> np.ndarray:
        return np.array([g.lower for g in self.genes], dtype=float)

    @cached_property
    def upper(self) -> np.ndarray:
        return np.array([g.upper for g in self.genes], dtype=float)

    @cached_property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    @cached_property
    def integer_mask(self) -> np.ndarray:
        return np.array([g.kind == "integer" for g in self.genes], dtype=bool)

    @cached_property
    def groups(self) -> np.ndarray:
        return np.array([g.group for g in self.genes], dtype=int)

    @property
    def n_groups(self) -> int:
        return int(self.groups.max()) + 1

    # -----------------------------------------------------------------------

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Uniform draw inside the bounds; integer genes uniform over their range."""
        shape = (len(self),) if size is None else (size, len(self))
        values = rng.uniform(self.lower, self.upper, size=shape)
        if self.integer_mask.any():
            ints = rng.integers(
                self.lower.astype(np.int64), self.upper.astype(np.int64) + 1, size=shape
            )
            values = np.where(self.integer_mask, ints, values)
        return values.astype(float)

    def sample_gene(self, index: int, rng: np.random.Generator) -> float:
        gene = self.genes[index]
        if gene.kind == "integer":
            return float(rng.integers(int(gene.lower), int(gene.upper) + 1))
        return float(rng.uniform(gene.lower, gene.upper))

    def contains(self, genome: np.ndarray) -> bool:
        """True when every gene is inside its bounds and integer genes are integral."""
        genome = np.asarray(genome, dtype=float)
        if genome.shape != (len(self),):
            return False
        in_bounds = np.all((genome >= self.lower) & (genome <= self.upper))
        integral = np.all(genome[self.integer_mask] == np.round(genome[self.integer_mask]))
        return bool(in_bounds and integral)

    def equal_rows(self, rows: np.ndarray, genome: np.ndarray) -> np.ndarray:
        """Boolean mask of the *rows* equal to *genome* under the duplicate tolerance."""
        diff = np.abs(rows - genome)
        tolerance = np.where(self.integer_mask, 0.0, DUPLICATE_TOLERANCE)
        return np.all(diff <= tolerance, axis=-1)


def round_half_away(values: np.ndarray) -> np.ndarray:
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def clamp_round(genome: np.ndarray, encoding: EncodingSpec) -> np.ndarray:
    """Clamp real genes to their bounds; round integer genes half away from zero, then clamp."""
    genome = np.asarray(genome, dtype=float)
    if genome.shape[-1] != len(encoding):
        raise ValueError(
            f"Genome length {genome.shape[-1]} does not match encoding length {len(encoding)}"
        )
    out = np.where(encoding.integer_mask, round_half_away(genome), genome)
    return np.clip(out, encoding.lower, encoding.upper)
