from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from reefopt.core.runconfig import RunConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunJob:
    """One independent CRO-SL run: a config variant under one seed."""

    variant: str
    seed: int
    config: RunConfig

    @property
    def label(self) -> str:
        return f"{self.variant}#{self.seed}"


@dataclass(frozen=True)
class JobResult:
    variant: str
    seed: int
    best_fitness: float
    evaluations: int
    best_genome: tuple[float, ...] = ()


def execute_job(job: RunJob) -> JobResult:
    """Run *job* to completion; safe to call in a worker process."""
    from reefopt.engine.cro import run

    problem = job.config.build_problem()
    params = job.config.params.with_overrides(seed=job.seed)
    best, telemetry = run(params, problem)
    return JobResult(
        variant=job.variant,
        seed=job.seed,
        best_fitness=best.fitness if best is not None else float("inf"),
        evaluations=telemetry.evaluations,
        best_genome=tuple(float(v) for v in best.genome) if best is not None else (),
    )


def run_jobs(jobs: Sequence[RunJob], threads: int = 1) -> list[JobResult | None]:
    """Execute *jobs*, at most *threads* at a time.

    Parameters
    ----------
    jobs:
        Independent runs; results come back in the same order.
    threads:
        Worker processes. 1 runs everything inline in this process.

    Returns
    -------
    One JobResult per job, or None for a job that raised.
    """
    results: list[JobResult | None] = [None] * len(jobs)
    if not jobs:
        return results

    if threads <= 1 or len(jobs) == 1:
        for k, job in enumerate(jobs):
            log.info("Running %s", job.label)
            try:
                results[k] = execute_job(job)
            except Exception as exc:
                log.warning("Run %s failed: %s", job.label, exc)
        return results

    log.info("Running %d jobs on %d workers", len(jobs), threads)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(execute_job, job): k for k, job in enumerate(jobs)}
        for future in as_completed(futures):
            k = futures[future]
            try:
                results[k] = future.result()
                log.info("Run %s OK", jobs[k].label)
            except Exception as exc:
                log.warning("Run %s failed: %s", jobs[k].label, exc)
    return results


@dataclass(frozen=True)
class VariantStats:
    variant: str
    runs: int
    min: float
    mean: float
    mean_evaluations: float


def summarize(variants: Sequence[str], results: Sequence[JobResult | None]) -> list[VariantStats]:
    """Min / mean best fitness per variant in *variants* order; failed runs are skipped."""
    stats = []
    for variant in variants:
        done = [r for r in results if r is not None and r.variant == variant]
        if not done:
            stats.append(VariantStats(variant, 0, float("nan"), float("nan"), float("nan")))
            continue
        fitness = np.array([r.best_fitness for r in done])
        stats.append(
            VariantStats(
                variant=variant,
                runs=len(done),
                min=float(fitness.min()),
                mean=float(fitness.mean()),
                mean_evaluations=float(np.mean([r.evaluations for r in done])),
            )
        )
    return stats
