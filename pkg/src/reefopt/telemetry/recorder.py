from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

BROODING = "brooding"
DEFAULT_RATIO_WINDOW = 50


@dataclass(frozen=True)
class LarvaEvent:
    """One larva of an iteration; ``source`` is a substrate index or the brooding index."""

    source: int
    fitness: float
    settled: bool


@dataclass
class IterationEvents:
    larvae: list[LarvaEvent] = field(default_factory=list)
    best_fitness: float = float("inf")
    # clones submitted to settlement
    budded: int = 0
    depredated: int = 0
    regenerated: bool = False


@dataclass(frozen=True)
class IterationRecord:
    """Counters of one iteration, indexed by source (substrates, then brooding)."""

    iteration: int
    best_fitness: float
    produced: tuple[int, ...]
    settled: tuple[int, ...]
    best_substrate: int | None
    budded: int = 0
    depredated: int = 0
    regenerated: bool = False

    @property
    def rejected(self) -> tuple[int, ...]:
        return tuple(p - s for p, s in zip(self.produced, self.settled))


@dataclass
class RunTelemetry:
    """Per-iteration records of one run plus its reproducibility metadata."""

    substrate_names: list[str]
    seed: int = 0
    generator: str = "PCG64"
    params_digest: str = ""
    records: list[IterationRecord] = field(default_factory=list)
    evaluations: int = 0
    seconds: float = 0.0

    @property
    def sources(self) -> list[str]:
        return [*self.substrate_names, BROODING]

    @property
    def brooding_index(self) -> int:
        return len(self.substrate_names)

    def record_iteration(self, events: IterationEvents) -> IterationRecord:
        n_sources = len(self.sources)
        produced = [0] * n_sources
        settled = [0] * n_sources
        best_source: int | None = None
        best_fitness = float("inf")
        for larva in events.larvae:
            produced[larva.source] += 1
            if larva.settled:
                settled[larva.source] += 1
            if larva.source == self.brooding_index or not np.isfinite(larva.fitness):
                continue
            if larva.fitness < best_fitness or (
                larva.fitness == best_fitness
                and best_source is not None
                and larva.source < best_source
            ):
                best_fitness = larva.fitness
                best_source = larva.source

        record = IterationRecord(
            iteration=len(self.records),
            best_fitness=float(events.best_fitness),
            produced=tuple(produced),
            settled=tuple(settled),
            best_substrate=best_source,
            budded=events.budded,
            depredated=events.depredated,
            regenerated=events.regenerated,
        )
        self.records.append(record)
        return record

    def best_fitness_series(self) -> np.ndarray:
        return np.array([r.best_fitness for r in self.records], dtype=float)

    def settled_series(self) -> dict[str, np.ndarray]:
        """Larvae settled per iteration for every source."""
        matrix = np.array([r.settled for r in self.records], dtype=int).reshape(
            len(self.records), len(self.sources)
        )
        return {name: matrix[:, k] for k, name in enumerate(self.sources)}


def best_larva_ratio(
    telemetry: RunTelemetry, window: int = DEFAULT_RATIO_WINDOW
) -> dict[str, np.ndarray]:
    """Moving-window percentage of iterations in which each substrate produced the best larva.

    Only iterations where some substrate produced a larva count toward the
    window; a window without such iterations yields NaN.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    n_sub = len(telemetry.substrate_names)
    n_iter = len(telemetry.records)
    if n_iter == 0:
        return {name: np.empty(0) for name in telemetry.substrate_names}
    flags = np.zeros((n_iter, n_sub))
    eligible = np.zeros(n_iter)
    for t, record in enumerate(telemetry.records):
        if sum(record.produced[:n_sub]) > 0:
            eligible[t] = 1.0
        if record.best_substrate is not None:
            flags[t, record.best_substrate] = 1.0

    kernel = np.ones(window)
    counts = np.array(
        [np.convolve(flags[:, k], kernel)[:n_iter] for k in range(n_sub)]
    ).reshape(n_sub, n_iter)
    totals = np.convolve(eligible, kernel)[:n_iter]
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = np.where(totals > 0, 100.0 * counts / totals, np.nan)
    return {name: ratios[k] for k, name in enumerate(telemetry.substrate_names)}
