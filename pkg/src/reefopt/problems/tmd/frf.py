"""Closed-loop floor-acceleration FRFs of a shear building fitted with TMDs.

Every TMD acts on its floor as a force ``F_i = H(s) Y_i`` driven by the
floor's absolute acceleration ``Y_i``. Per frequency the open-loop
responses come from one dynamic-stiffness solve:

    G_F = s^2 D^-1                 (force -> acceleration)
    G_g = r - s^2 D^-1 M r         (ground acceleration -> acceleration)

with ``D = M s^2 + C s + K``; the closed loop solves
``(I - G_F diag(h)) Y = G_g``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from reefopt.core.errors import ConfigError

from .building import BuildingSpec, assemble_matrices

log = logging.getLogger(__name__)

MAGNITUDE_CAP = 1e9
# grid points between samples of the peak pre-scan
COARSE_STRIDE = 10
# pre-scan maxima below this share of the largest one are not refined
CANDIDATE_RATIO = 0.25
# half-width (rad/s) scanned at full resolution around every TMD frequency
TMD_WINDOW = 0.25


@dataclass(frozen=True)
class FrfGrid:
    omega_min: float = 0.5
    omega_max: float = 60.0
    step: float = 0.005

    def __post_init__(self) -> None:
        if not self.omega_min > 0:
            raise ConfigError(f"grid.omega_min must be > 0, got {self.omega_min}")
        if not self.step > 0:
            raise ConfigError(f"grid.step must be > 0, got {self.step}")
        if self.omega_max <= self.omega_min:
            raise ConfigError(
                f"grid.omega_max {self.omega_max} must exceed omega_min {self.omega_min}"
            )

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> FrfGrid:
        unknown = set(raw) - {"omega_min", "omega_max", "step"}
        if unknown:
            raise ConfigError(f"grid: unknown keys {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in raw.items()})

    @property
    def n_points(self) -> int:
        return int(round((self.omega_max - self.omega_min) / self.step)) + 1

    def omegas(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.n_points)

    def halved(self) -> FrfGrid:
        return FrfGrid(self.omega_min, self.omega_max, self.step / 2.0)


def tmd_transfer(
    omega_t: float, xi_t: float, m_t: float, s: complex | np.ndarray
) -> complex | np.ndarray:
    """H(s) = -m (2 xi w s + w^2) / (s^2 + 2 xi w s + w^2); zero for a massless TMD.

    An exact pole yields an infinite value.
    """
    s = np.asarray(s, dtype=complex)
    if m_t == 0:
        h = np.zeros_like(s)
    else:
        num = 2.0 * xi_t * omega_t * s + omega_t**2
        den = s * s + num
        with np.errstate(divide="ignore", invalid="ignore"):
            h = np.where(den == 0, complex(np.inf), -m_t * num / np.where(den == 0, 1.0, den))
    return complex(h) if h.ndim == 0 else h


def floor_feedback(
    design_omega: np.ndarray,
    design_xi: np.ndarray,
    design_mass: np.ndarray,
    floors: np.ndarray,
    n_floors: int,
    s: np.ndarray,
) -> np.ndarray:
    """Sum of TMD transfers per floor, shape (len(s), n_floors); floors are 1-based."""
    h = np.zeros((len(s), n_floors), dtype=complex)
    for w, xi, m, floor in zip(design_omega, design_xi, design_mass, floors):
        h[:, int(floor) - 1] += tmd_transfer(float(w), float(xi), float(m), s)
    return h


def _open_loop(
    M: np.ndarray, K: np.ndarray, C: np.ndarray, s: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    n = len(M)
    r = np.ones(n)
    s2 = s * s
    D = M[None] * s2[:, None, None] + C[None] * s[:, None, None] + K[None]
    D_inv = np.linalg.inv(D)
    G_F = s2[:, None, None] * D_inv
    G_g = r[None, :] - s2[:, None] * (D_inv @ (M @ r))
    return G_F, G_g


def _closed_loop(G_F: np.ndarray, G_g: np.ndarray, h: np.ndarray) -> np.ndarray:
    n = G_F.shape[-1]
    A = np.eye(n)[None] - G_F * h[:, None, :]
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        Y = np.linalg.solve(A, G_g[..., None])[..., 0]
        mag = np.abs(Y)
    return np.where(np.isfinite(mag), np.minimum(mag, MAGNITUDE_CAP), MAGNITUDE_CAP)


class FrfModel:
    """Open-loop FRFs of one building precomputed over a grid.

    Closed-loop curves for any TMD design then cost one batched N x N solve.
    """

    def __init__(self, spec: BuildingSpec, grid: FrfGrid | None = None) -> None:
        self.spec = spec
        self.grid = grid or FrfGrid()
        self.M, self.K, self.C = assemble_matrices(spec)
        self.omega = self.grid.omegas()
        self.s = 1j * self.omega
        self.G_F, self.G_g = _open_loop(self.M, self.K, self.C, self.s)
        log.debug(
            "FRF model for %d floors over %d grid points", spec.n_floors, len(self.omega)
        )

    @property
    def n_floors(self) -> int:
        return self.spec.n_floors

    def open_loop(self) -> np.ndarray:
        """|Y_i / A_g| without TMDs, shape (n_floors, n_points)."""
        mag = np.abs(self.G_g)
        return np.minimum(mag, MAGNITUDE_CAP).T

    def closed_loop(self, design) -> np.ndarray:
        """|Y_i / A_g| with *design* attached, shape (n_floors, n_points)."""
        h = floor_feedback(
            design.omega, design.xi, design.mass, design.floors, self.n_floors, self.s
        )
        return _closed_loop(self.G_F, self.G_g, h).T

    def closed_loop_at(self, design, index: np.ndarray) -> np.ndarray:
        """Closed-loop magnitudes on the grid points *index*, shape (n_floors, len(index))."""
        s = self.s[index]
        h = floor_feedback(design.omega, design.xi, design.mass, design.floors, self.n_floors, s)
        return _closed_loop(self.G_F[index], self.G_g[index], h).T

    def response_at(self, design, omega: float) -> np.ndarray:
        """Closed-loop magnitudes of every floor at one frequency."""
        s = np.array([1j * omega])
        G_F, G_g = _open_loop(self.M, self.K, self.C, s)
        h = floor_feedback(design.omega, design.xi, design.mass, design.floors, self.n_floors, s)
        return _closed_loop(G_F, G_g, h)[0]

    def candidate_points(self, design) -> np.ndarray:
        """Grid indices around the local maxima of a strided pre-scan.

        Every local maximum of the envelope over floors reaching CANDIDATE_RATIO
        times the largest one contributes the full-resolution points up to one
        stride on either side. The points within TMD_WINDOW of every TMD
        frequency are always included.
        """
        n = len(self.omega)
        coarse = np.arange(0, n, COARSE_STRIDE)
        if coarse[-1] != n - 1:
            coarse = np.append(coarse, n - 1)
        envelope = self.closed_loop_at(design, coarse).max(axis=0)
        padded = np.concatenate(([-np.inf], envelope, [-np.inf]))
        is_peak = (envelope >= padded[:-2]) & (envelope >= padded[2:])
        is_peak &= envelope >= CANDIDATE_RATIO * envelope.max()
        windows = [
            np.arange(max(c - COARSE_STRIDE, 0), min(c + COARSE_STRIDE, n - 1) + 1)
            for c in coarse[is_peak]
        ]
        half = int(np.ceil(TMD_WINDOW / self.grid.step))
        for w in np.asarray(design.omega)[np.asarray(design.mass) > 0]:
            k = int(round((float(w) - self.grid.omega_min) / self.grid.step))
            lo, hi = max(k - half, 0), min(k + half, n - 1)
            if lo <= hi:
                windows.append(np.arange(lo, hi + 1))
        return np.unique(np.concatenate(windows))

    def peak(self, design) -> float:
        """Infinity norm over floors and frequency.

        The grid maximum is searched in the windows of :meth:`candidate_points`
        and refined with a parabola through its neighbours.
        """
        index = self.candidate_points(design)
        curves = self.closed_loop_at(design, index)
        floor, j = np.unravel_index(int(np.argmax(curves)), curves.shape)
        peak = float(curves[floor, j])
        if peak >= MAGNITUDE_CAP or not 0 < j < len(index) - 1:
            return peak
        k = index[j]
        if index[j - 1] != k - 1 or index[j + 1] != k + 1:
            return peak
        y0, y1, y2 = curves[floor, j - 1 : j + 2]
        curvature = y0 - 2.0 * y1 + y2
        if curvature >= 0:
            return peak
        offset = 0.5 * (y0 - y2) / curvature
        omega_star = self.omega[k] + offset * (self.omega[1] - self.omega[0])
        refined = float(np.max(self.response_at(design, omega_star)))
        return max(peak, refined)


def frf_closed_loop(spec: BuildingSpec, design, grid: FrfGrid | None = None) -> np.ndarray:
    """Per-floor closed-loop magnitude curves, shape (n_floors, n_points)."""
    return FrfModel(spec, grid).closed_loop(design)


def to_db(magnitude: np.ndarray) -> np.ndarray:
    return 20.0 * np.log10(np.maximum(magnitude, np.finfo(float).tiny))
