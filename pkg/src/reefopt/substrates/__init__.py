"""Substrate layers.

Kinds
-----
  HS     Harmony Search note selection over the whole reef
  DE     x1 + F (x2 - x3)
  TwoPx  two-point crossover
  MPx    multi-point crossover with m cut points
  GM     Gaussian mutation with a linearly scheduled sigma
  SAbM   strange-attractor mutation (Gaussian fallback)

Corals that a substrate cannot serve (e.g. DE with fewer than three corals)
are brooded by the engine.
"""

from __future__ import annotations

from .attractor import (
    AttractorSpec,
    UnboundedAttractor,
    attractor_perturbation,
    quadratic_map_iterate,
    sabm_mutate,
)
from .layers import (
    SUBSTRATE_KINDS,
    SpawnContext,
    Substrate,
    SubstrateConfig,
    build_layers,
    sigma_by_gene,
)
from .operators import (
    brood,
    crossover_2p,
    crossover_2p_at,
    crossover_mp,
    crossover_segments,
    de_mutate,
    gaussian_mutate,
    hs_mutate,
    pick_de_partners,
)
from .schedules import LinearSchedule, schedule_value

__all__ = [
    "AttractorSpec",
    "UnboundedAttractor",
    "attractor_perturbation",
    "quadratic_map_iterate",
    "sabm_mutate",
    "SUBSTRATE_KINDS",
    "SpawnContext",
    "Substrate",
    "SubstrateConfig",
    "build_layers",
    "sigma_by_gene",
    "brood",
    "crossover_2p",
    "crossover_2p_at",
    "crossover_mp",
    "crossover_segments",
    "de_mutate",
    "gaussian_mutate",
    "hs_mutate",
    "pick_de_partners",
    "LinearSchedule",
    "schedule_value",
]
