"""N-storey shear building: matrices, Rayleigh damping and modal analysis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
from scipy import linalg

from reefopt.core.errors import ConfigError


@dataclass(frozen=True)
class BuildingSpec:
    """Floor stiffnesses k (N/m), floor masses m (kg) and the proportional damping ratio."""

    k: tuple[float, ...]
    m: tuple[float, ...]
    xi_s: float
    name: str = ""

    def __post_init__(self) -> None:
        if not self.k or len(self.k) != len(self.m):
            raise ConfigError(
                f"building: k and m need the same non-zero length, got {len(self.k)} and {len(self.m)}"
            )
        if any(v <= 0 for v in (*self.k, *self.m)) or self.xi_s <= 0:
            raise ConfigError("building: stiffnesses, masses and xi_s must be positive")

    @property
    def n_floors(self) -> int:
        return len(self.k)

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> BuildingSpec:
        """Either ``{"preset": name}`` or explicit ``k``, ``m`` and ``xi_s``."""
        unknown = set(raw) - {"preset", "k", "m", "xi_s", "name"}
        if unknown:
            raise ConfigError(f"building: unknown keys {sorted(unknown)}")
        if "preset" in raw:
            if set(raw) - {"preset"}:
                raise ConfigError("building: 'preset' cannot be combined with explicit parameters")
            return preset(raw["preset"])
        missing = {"k", "m", "xi_s"} - set(raw)
        if missing:
            raise ConfigError(f"building: missing keys {sorted(missing)}")
        return cls(
            k=tuple(float(v) for v in raw["k"]),
            m=tuple(float(v) for v in raw["m"]),
            xi_s=float(raw["xi_s"]),
            name=str(raw.get("name", "")),
        )


PRESETS: dict[str, BuildingSpec] = {
    "two_storey": BuildingSpec(k=(1000.0, 500.0), m=(2.0, 1.0), xi_s=0.01, name="two_storey"),
    "four_storey": BuildingSpec(
        k=(2000.0, 1500.0, 1000.0, 500.0), m=(2.0, 2.0, 2.0, 1.0), xi_s=0.01, name="four_storey"
    ),
    # identified laboratory rig
    "lab_rig": BuildingSpec(k=(1111.8, 389.1), m=(2.14, 1.88), xi_s=0.006, name="lab_rig"),
}

# largest TMD mass (kg) per preset; 0.05 otherwise
PRESET_MASS_BOUND = {"lab_rig": 0.1}


def preset(name: str) -> BuildingSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"Unknown building preset {name!r}. Available: {', '.join(sorted(PRESETS))}"
        ) from None


def stiffness_matrix(k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    n = len(k)
    upper = np.append(k[1:], 0.0)
    K = np.diag(k + upper)
    off = -k[1:]
    K[np.arange(n - 1), np.arange(1, n)] = off
    K[np.arange(1, n), np.arange(n - 1)] = off
    return K


def natural_frequencies(M: np.ndarray, K: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve K phi = w^2 M phi.

    Returns ascending angular frequencies (rad/s) and mass-normalized mode
    shapes as columns.
    """
    eigenvalues, modes = linalg.eigh(K, M)
    return np.sqrt(np.clip(eigenvalues, 0.0, None)), modes


def assemble_matrices(spec: BuildingSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mass, stiffness and Rayleigh damping matrices.

    C = a M + b K with a = 2 xi w1 w2 / (w1 + w2) and b = 2 xi / (w1 + w2)
    over the two highest natural frequencies (w1 = w2 for one storey), so the
    upper modes carry xi and the lower ones slightly more.
    """
    M = np.diag(np.asarray(spec.m, dtype=float))
    K = stiffness_matrix(np.asarray(spec.k))
    omegas, _ = natural_frequencies(M, K)
    w2 = omegas[-1]
    w1 = omegas[-2] if len(omegas) > 1 else w2
    a = 2.0 * spec.xi_s * w1 * w2 / (w1 + w2)
    b = 2.0 * spec.xi_s / (w1 + w2)
    C = a * M + b * K
    return M, K, C


def modal_damping(spec: BuildingSpec) -> np.ndarray:
    """Damping ratio of every mode under the Rayleigh matrix."""
    M, K, C = assemble_matrices(spec)
    omegas, modes = natural_frequencies(M, K)
    modal_c = np.diag(modes.T @ C @ modes)
    return modal_c / (2.0 * omegas)
