"""The CRO-SL iteration loop.

One iteration: broadcast spawning / brooding, evaluation, settlement,
optional budding, depredation, best-ever update and stagnation handling.
All randomness flows through one ``numpy.random.Generator`` so a run is
fully determined by (params, problem, seed).
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from reefopt.core.errors import ConfigError
from reefopt.engine.encoding import clamp_round
from reefopt.engine.params import RunParams
from reefopt.engine.problem import Problem
from reefopt.engine.reef import Coral, Reef
from reefopt.substrates.layers import SpawnContext, Substrate, build_layers
from reefopt.substrates.operators import brood
from reefopt.telemetry.recorder import IterationEvents, LarvaEvent, RunTelemetry

log = logging.getLogger(__name__)

GENERATOR_NAME = "PCG64"
# re-draws for an initial coral that duplicates an occupant
INIT_RESAMPLE_ATTEMPTS = 10
# slack on fa * n and fd * n before ceil / floor
_ROUND_EPS = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class Evaluator:
    """Repairs, clamps and evaluates genomes for one run, counting evaluations.

    With ``threads > 1`` the objective calls of one batch run on a thread
    pool; results keep the input order.
    """

    def __init__(self, problem: Problem, threads: int = 1) -> None:
        self.problem = problem
        self.threads = max(1, threads)
        self.evaluations = 0
        self._pool: ThreadPoolExecutor | None = None

    def __enter__(self) -> Evaluator:
        if self.threads > 1:
            self._pool = ThreadPoolExecutor(max_workers=self.threads)
        return self

    def __exit__(self, *exc_info: object) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def prepare(self, genome: np.ndarray) -> np.ndarray:
        encoding = self.problem.encoding
        return clamp_round(self.problem.repair(clamp_round(genome, encoding)), encoding)

    def evaluate_many(self, genomes: Sequence[np.ndarray]) -> list[Coral]:
        prepared = [self.prepare(g) for g in genomes]
        if self._pool is not None and len(prepared) > 1:
            costs = list(self._pool.map(self.problem.evaluate, prepared))
        else:
            costs = [self.problem.evaluate(g) for g in prepared]
        self.evaluations += len(prepared)
        corals = []
        for genome, cost in zip(prepared, costs):
            cost = float(cost)
            if np.isfinite(cost):
                corals.append(Coral(genome, cost, True))
            else:
                corals.append(Coral(genome, float("inf"), False))
        return corals

    def evaluate(self, genome: np.ndarray) -> Coral:
        return self.evaluate_many([genome])[0]


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------


def initialize_reef(
    params: RunParams,
    problem: Problem,
    rng: np.random.Generator,
    evaluator: Evaluator | None = None,
    seeds: Sequence[np.ndarray] | None = None,
) -> Reef:
    """Occupy round(rho0 * P) random slots.

    Seed solutions fill the first occupied slots, a ``perturb_fraction`` of
    the remainder are Gaussian perturbations of the first seed and the rest
    are uniform random. *seeds* overrides ``problem.seed_solutions()``.
    """
    evaluator = evaluator or Evaluator(problem)
    encoding = problem.encoding
    seeds = list(problem.seed_solutions() if seeds is None else seeds)
    n_occupied = params.occupied_at_start
    if len(seeds) > n_occupied:
        raise ConfigError(
            f"{len(seeds)} seed solutions exceed the {n_occupied} initially occupied slots"
        )
    for k, seed in enumerate(seeds):
        if np.shape(seed) != (len(encoding),):
            raise ConfigError(
                f"Seed solution {k} has shape {np.shape(seed)}, expected ({len(encoding)},)"
            )

    reef = Reef.empty(params.reef_size, params.n_substrates, encoding)
    slots = np.sort(rng.choice(params.reef_size, size=n_occupied, replace=False))

    n_free = n_occupied - len(seeds)
    n_perturbed = int(params.perturb_fraction * n_free + 0.5) if seeds else 0
    genomes: list[np.ndarray] = [np.asarray(s, dtype=float) for s in seeds]
    provenance = ["seed"] * len(seeds)
    if n_perturbed:
        sigma = params.perturb_sigma * encoding.span
        noise = rng.normal(0.0, sigma, size=(n_perturbed, len(encoding)))
        genomes.extend(np.asarray(seeds[0], dtype=float) + noise)
        provenance += ["perturbed"] * n_perturbed
    n_random = n_occupied - len(genomes)
    if n_random:
        genomes.extend(encoding.sample(rng, size=n_random))
        provenance += ["random"] * n_random

    corals = evaluator.evaluate_many(genomes)
    for slot, coral, origin in zip(slots, corals, provenance):
        attempts = 0
        while not coral.evaluated or reef.contains_genome(coral.genome):
            if attempts == INIT_RESAMPLE_ATTEMPTS:
                break
            coral = evaluator.evaluate(encoding.sample(rng))
            origin = "random"
            attempts += 1
        else:
            reef.place(int(slot), coral, origin)
            continue
        log.warning("Slot %d left empty: no distinct feasible coral in %d draws", slot, attempts)

    reef.update_best()
    return reef


# ---------------------------------------------------------------------------
# Reef operators
# ---------------------------------------------------------------------------


def settle(reef: Reef, larva: Coral, kappa: int, rng, provenance: str = "") -> bool:
    """Try *kappa* uniformly drawn slots; settle in an empty one or over a strictly worse occupant.

    A larva equal to any occupant never settles.
    """
    if not larva.evaluated:
        return False
    if reef.contains_genome(larva.genome):
        return False
    for _ in range(kappa):
        slot = int(rng.integers(reef.size))
        if not reef.occupancy[slot] or larva.fitness < reef.fitness[slot]:
            reef.place(slot, larva, provenance)
            return True
    return False


def budding(reef: Reef, fa: float, kappa: int, rng) -> tuple[int, int]:
    """Clone the ceil(fa * occupied) best corals into settlement.

    Returns (attempts, settled). Under duplicate exclusion clones of corals
    still on the reef are always rejected.
    """
    occupied = reef.occupied_slots()
    n_buds = math.ceil(fa * len(occupied) - _ROUND_EPS) if len(occupied) else 0
    if n_buds <= 0:
        return 0, 0
    order = np.lexsort((occupied, reef.fitness[occupied]))
    buds = [reef.coral(int(occupied[k])) for k in order[:n_buds]]
    settled = sum(settle(reef, bud, kappa, rng, "budding") for bud in buds)
    return n_buds, settled


def depredation(reef: Reef, fd: float, pd: float, rng) -> int:
    """With probability *pd* free the floor(fd * occupied) worst corals.

    Ties in fitness remove the higher slot index first. Returns the number removed.
    """
    if rng.random() >= pd:
        return 0
    occupied = reef.occupied_slots()
    n_remove = math.floor(fd * len(occupied) + _ROUND_EPS)
    if n_remove <= 0:
        return 0
    order = np.lexsort((-occupied, -reef.fitness[occupied]))
    for k in order[:n_remove]:
        reef.free(int(occupied[k]))
    return n_remove


def stagnation_regenerate(
    reef: Reef,
    params: RunParams,
    problem: Problem,
    rng: np.random.Generator,
    evaluator: Evaluator | None = None,
) -> Reef:
    """Rebuild the reef around ``best_ever``, which survives unchanged."""
    best = reef.best_ever
    seeds = [best.genome] if best is not None else []
    fresh = initialize_reef(params, problem, rng, evaluator, seeds=seeds)
    if best is not None and (fresh.best_ever is None or best.fitness <= fresh.best_ever.fitness):
        fresh.best_ever = best.copy()
    fresh.stagnation = 0
    return fresh


# ---------------------------------------------------------------------------
# Iteration
# ---------------------------------------------------------------------------


def _spawn_all(
    reef: Reef,
    layers: Sequence[Substrate],
    params: RunParams,
    rng: np.random.Generator,
    iteration: int,
) -> tuple[list[np.ndarray], list[int]]:
    slots = reef.occupied_slots()
    ctx = SpawnContext(
        population=reef.genomes[slots].copy(),
        encoding=reef.encoding,
        iteration=iteration,
        total_iterations=max(params.iterations, 1),
    )
    brooding = len(layers)
    larvae: list[np.ndarray] = []
    sources: list[int] = []
    for row, slot in enumerate(slots):
        children = None
        if rng.random() < params.pb:
            layer = layers[int(reef.substrate_of_slot[slot])]
            children = layer.spawn(row, ctx, rng)
            source = layer.index
        if children is None:
            children = [brood(ctx.population[row], reef.encoding, rng)]
            source = brooding
        larvae.extend(children)
        sources.extend([source] * len(children))
    return larvae, sources


def iterate(
    reef: Reef,
    params: RunParams,
    problem: Problem,
    rng: np.random.Generator,
    telemetry: RunTelemetry,
    layers: Sequence[Substrate] | None = None,
    evaluator: Evaluator | None = None,
) -> Reef:
    """Run one CRO-SL iteration and append its record to *telemetry*.

    Returns the reef to continue with: the same object, or a fresh one when
    stagnation triggered a regeneration.
    """
    layers = layers if layers is not None else build_layers(params.substrates, problem.encoding)
    evaluator = evaluator or Evaluator(problem)
    iteration = len(telemetry.records)

    genomes, sources = _spawn_all(reef, layers, params, rng, iteration)
    corals = evaluator.evaluate_many(genomes)

    events = IterationEvents()
    for source, larva in zip(sources, corals):
        origin = layers[source].name if source < len(layers) else "brooding"
        settled = settle(reef, larva, params.kappa, rng, origin)
        events.larvae.append(LarvaEvent(source, larva.fitness, settled))

    if params.budding_enabled:
        events.budded = budding(reef, params.fa, params.kappa, rng)[0]
    events.depredated = depredation(reef, params.fd, params.pd, rng)

    if reef.update_best():
        reef.stagnation = 0
    else:
        reef.stagnation += 1
    if params.stagnation_window is not None and reef.stagnation >= params.stagnation_window:
        log.info("No improvement for %d iterations, regenerating the reef", reef.stagnation)
        reef = stagnation_regenerate(reef, params, problem, rng, evaluator)
        events.regenerated = True

    best = reef.best_ever
    events.best_fitness = best.fitness if best is not None else float("inf")
    telemetry.record_iteration(events)
    return reef


def run(
    params: RunParams,
    problem: Problem,
    rng: np.random.Generator | None = None,
    *,
    threads: int = 1,
) -> tuple[Coral | None, RunTelemetry]:
    """Execute ``params.iterations`` iterations and return (best_ever, telemetry).

    ``best_ever`` is None only when no feasible coral was ever found.
    """
    rng = rng if rng is not None else make_rng(params.seed)
    layers = build_layers(params.substrates, problem.encoding)
    telemetry = RunTelemetry(
        substrate_names=[layer.name for layer in layers],
        seed=params.seed,
        generator=GENERATOR_NAME,
        params_digest=params.digest(),
    )
    log.info(
        "CRO-SL run: %s, reef %d, %d iterations, substrates %s, seed %d",
        problem.kind or type(problem).__name__,
        params.reef_size,
        params.iterations,
        ", ".join(telemetry.substrate_names),
        params.seed,
    )

    started = time.perf_counter()
    with Evaluator(problem, threads) as evaluator:
        reef = initialize_reef(params, problem, rng, evaluator)
        for k in range(params.iterations):
            reef = iterate(reef, params, problem, rng, telemetry, layers, evaluator)
            if log.isEnabledFor(logging.DEBUG) and (k + 1) % 100 == 0:
                log.debug("iteration %d: best %.6g", k + 1, telemetry.records[-1].best_fitness)
        telemetry.evaluations = evaluator.evaluations
    telemetry.seconds = time.perf_counter() - started

    best = reef.best_ever.copy() if reef.best_ever is not None else None
    log.info(
        "Finished: best %s after %d evaluations (%.1fs)",
        f"{best.fitness:.6g}" if best is not None else "none",
        telemetry.evaluations,
        telemetry.seconds,
    )
    return best, telemetry
