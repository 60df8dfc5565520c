"""CRO-SL engine: encodings, the reef, run parameters and the objective contract.

The iteration loop itself lives in :mod:`reefopt.engine.cro`.
"""

from __future__ import annotations

from .encoding import DUPLICATE_TOLERANCE, EncodingSpec, GeneSpec, clamp_round
from .params import RunParams
from .problem import Problem, SphereProblem
from .reef import Coral, Reef

__all__ = [
    "DUPLICATE_TOLERANCE",
    "EncodingSpec",
    "GeneSpec",
    "clamp_round",
    "RunParams",
    "Problem",
    "SphereProblem",
    "Coral",
    "Reef",
]
