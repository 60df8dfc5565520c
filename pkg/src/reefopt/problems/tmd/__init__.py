"""TMD design and placement on a shear building.

The genome holds M TMDs as ``[omega..., xi..., mass..., floor...]``; the
cost is the largest floor-acceleration FRF magnitude over frequency.
"""

from __future__ import annotations

from .building import (
    PRESET_MASS_BOUND,
    PRESETS,
    BuildingSpec,
    assemble_matrices,
    modal_damping,
    natural_frequencies,
    preset,
    stiffness_matrix,
)
from .frf import MAGNITUDE_CAP, FrfGrid, FrfModel, frf_closed_loop, tmd_transfer, to_db
from .problem import TmdBounds, TmdDesign, TmdProblem, fitness_g, tmd_encoding

__all__ = [
    "PRESET_MASS_BOUND",
    "PRESETS",
    "BuildingSpec",
    "assemble_matrices",
    "modal_damping",
    "natural_frequencies",
    "preset",
    "stiffness_matrix",
    "MAGNITUDE_CAP",
    "FrfGrid",
    "FrfModel",
    "frf_closed_loop",
    "tmd_transfer",
    "to_db",
    "TmdBounds",
    "TmdDesign",
    "TmdProblem",
    "fitness_g",
    "tmd_encoding",
]
