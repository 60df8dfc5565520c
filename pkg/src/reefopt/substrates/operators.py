"""Broadcast-spawning operators and the brooding mutation.

Every operator is a pure function of its inputs and an explicit
``numpy.random.Generator``; outputs are already passed through
``clamp_round`` so they satisfy the encoding.
"""

from __future__ import annotations

import numpy as np

from reefopt.engine.encoding import EncodingSpec, clamp_round


def hs_mutate(
    coral: np.ndarray,
    population: np.ndarray,
    hmcr: float,
    par: float,
    delta_by_group: np.ndarray,
    encoding: EncodingSpec,
    rng: np.random.Generator,
) -> np.ndarray:
    """Harmony Search note selection over the whole occupied reef.

    Per gene: with probability *hmcr* copy that gene from a uniformly chosen
    reef member, otherwise resample it in bounds; then with probability
    *par* add +/- the gene group's delta.
    """
    length = len(coral)
    fresh = encoding.sample(rng)
    if len(population):
        memory = rng.random(length) < hmcr
        donors = rng.integers(0, len(population), size=length)
        remembered = population[donors, np.arange(length)]
        larva = np.where(memory, remembered, fresh)
    else:
        larva = fresh
    adjust = rng.random(length) < par
    signs = np.where(rng.random(length) < 0.5, -1.0, 1.0)
    delta = np.asarray(delta_by_group, dtype=float)[encoding.groups]
    larva = larva + np.where(adjust, signs * delta, 0.0)
    return clamp_round(larva, encoding)


def de_mutate(
    x1: np.ndarray,
    x2: np.ndarray,
    x3: np.ndarray,
    f_value: float,
    encoding: EncodingSpec,
) -> np.ndarray:
    """x1 + F (x2 - x3)."""
    return clamp_round(x1 + f_value * (x2 - x3), encoding)


def pick_de_partners(
    index: int, population_size: int, rng: np.random.Generator
) -> tuple[int, int] | None:
    """Two distinct reef members other than *index*, or None with fewer than 3 corals."""
    if population_size < 3:
        return None
    others = np.delete(np.arange(population_size), index)
    second, third = rng.choice(others, size=2, replace=False)
    return int(second), int(third)


def crossover_segments(
    parent_a: np.ndarray, parent_b: np.ndarray, cuts: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Alternate parents between sorted cut points; segment 0 comes from *parent_a*."""
    length = len(parent_a)
    segment = np.searchsorted(np.asarray(cuts), np.arange(length), side="right")
    from_b = segment % 2 == 1
    child1 = np.where(from_b, parent_b, parent_a)
    child2 = np.where(from_b, parent_a, parent_b)
    return child1, child2


def crossover_2p_at(
    parent_a: np.ndarray, parent_b: np.ndarray, i: int, j: int
) -> tuple[np.ndarray, np.ndarray]:
    """Swap the segment [i, j); i == j falls back to one-point crossover at i."""
    i, j = sorted((int(i), int(j)))
    cuts = np.array([i]) if i == j else np.array([i, j])
    return crossover_segments(parent_a, parent_b, cuts)


def crossover_2p(
    parent_a: np.ndarray, parent_b: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    length = len(parent_a)
    if len(parent_b) != length:
        raise ValueError("Crossover parents differ in length")
    if length < 2:
        return parent_b.copy(), parent_a.copy()
    i, j = rng.integers(1, length, size=2)
    return crossover_2p_at(parent_a, parent_b, int(i), int(j))


def crossover_mp(
    parent_a: np.ndarray, parent_b: np.ndarray, m_points: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Multi-point crossover with *m_points* distinct interior cut points."""
    length = len(parent_a)
    if len(parent_b) != length:
        raise ValueError("Crossover parents differ in length")
    if not 1 <= m_points < length:
        raise ValueError(f"Multi-point crossover needs 1 <= m < {length}, got {m_points}")
    cuts = np.sort(rng.choice(np.arange(1, length), size=m_points, replace=False))
    return crossover_segments(parent_a, parent_b, cuts)


def gaussian_mutate(
    coral: np.ndarray,
    sigma_by_gene: np.ndarray,
    encoding: EncodingSpec,
    rng: np.random.Generator,
) -> np.ndarray:
    noise = rng.normal(0.0, np.asarray(sigma_by_gene, dtype=float), size=len(coral))
    return clamp_round(coral + noise, encoding)


def brood(coral: np.ndarray, encoding: EncodingSpec, rng: np.random.Generator) -> np.ndarray:
    """Resample exactly one uniformly chosen gene uniformly within its bounds."""
    larva = coral.copy()
    gene = int(rng.integers(0, len(coral)))
    larva[gene] = encoding.sample_gene(gene, rng)
    return larva
