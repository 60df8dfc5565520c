"""Strange-attractor based mutation (SAbM).

Perturbations are read off a bounded trajectory of the general
two-dimensional quadratic map

    x' = a1 + a2 x + a3 x^2 + a4 x y + a5 y + a6 y^2
    y' = a7 + a8 x + a9 x^2 + a10 x y + a11 y + a12 y^2
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from reefopt.engine.encoding import EncodingSpec, clamp_round
from reefopt.substrates.operators import gaussian_mutate

log = logging.getLogger(__name__)

COEFFICIENT_RANGE = 1.2
MIN_STEPS = 2
MAX_STEPS = 5000
DIVERGENCE_BOUND = 1e6
START_POINT = (0.05, 0.05)
MAX_ATTEMPTS = 20


class UnboundedAttractor(ArithmeticError):
    """The quadratic map left the |x|, |y| <= 1e6 box."""


@dataclass(frozen=True)
class AttractorSpec:
    a: tuple[float, ...]
    s_iterations: int

    def __post_init__(self) -> None:
        if len(self.a) != 12:
            raise ValueError(f"Quadratic map needs 12 coefficients, got {len(self.a)}")
        if any(abs(c) > COEFFICIENT_RANGE for c in self.a):
            raise ValueError(f"Coefficients must lie in [-1.2, 1.2], got {self.a}")
        if not MIN_STEPS <= self.s_iterations <= MAX_STEPS:
            raise ValueError(f"S must lie in [2, 5000], got {self.s_iterations}")

    @classmethod
    def draw(cls, rng: np.random.Generator, min_steps: int = MIN_STEPS) -> AttractorSpec:
        coefficients = rng.uniform(-COEFFICIENT_RANGE, COEFFICIENT_RANGE, size=12)
        steps = int(rng.integers(max(min_steps, MIN_STEPS), MAX_STEPS + 1))
        return cls(tuple(float(c) for c in coefficients), steps)


def quadratic_map_iterate(spec: AttractorSpec, steps: int | None = None) -> np.ndarray:
    """Return the (steps, 2) matrix of points visited after each map step."""
    steps = spec.s_iterations if steps is None else steps
    if not MIN_STEPS <= steps <= MAX_STEPS:
        raise ValueError(f"steps must lie in [2, 5000], got {steps}")
    a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12 = spec.a
    x, y = START_POINT
    points = np.empty((steps, 2))
    for k in range(steps):
        x, y = (
            a1 + a2 * x + a3 * x * x + a4 * x * y + a5 * y + a6 * y * y,
            a7 + a8 * x + a9 * x * x + a10 * x * y + a11 * y + a12 * y * y,
        )
        # NaN fails both comparisons, so test the in-box condition
        if not (abs(x) <= DIVERGENCE_BOUND and abs(y) <= DIVERGENCE_BOUND):
            raise UnboundedAttractor(f"Trajectory left the box at step {k}")
        points[k] = (x, y)
    return points


def attractor_perturbation(
    trajectory: np.ndarray, length: int, rng: np.random.Generator
) -> np.ndarray:
    """Pick *length* distinct trajectory points, one coordinate each, with random signs."""
    order = rng.permutation(len(trajectory))[:length]
    x_or_y = rng.integers(0, 2, size=length)
    signs = np.where(rng.random(length) < 0.5, -1.0, 1.0)
    return trajectory[order, x_or_y] * signs


def sabm_mutate(
    coral: np.ndarray,
    encoding: EncodingSpec,
    rng: np.random.Generator,
    fallback_sigma: np.ndarray,
    max_attempts: int = MAX_ATTEMPTS,
) -> np.ndarray:
    """Perturb *coral* along a freshly drawn bounded strange attractor.

    After *max_attempts* diverging attractors in a row the larva comes from
    a Gaussian mutation with *fallback_sigma* instead.
    """
    length = len(coral)
    if length > MAX_STEPS:
        raise ValueError(f"SAbM supports at most {MAX_STEPS} genes, got {length}")
    for _ in range(max_attempts):
        spec = AttractorSpec.draw(rng, min_steps=length)
        try:
            trajectory = quadratic_map_iterate(spec)
        except UnboundedAttractor:
            continue
        return clamp_round(coral + attractor_perturbation(trajectory, length, rng), encoding)
    log.debug("No bounded attractor in %d draws, using Gaussian fallback", max_attempts)
    return gaussian_mutate(coral, fallback_sigma, encoding, rng)
