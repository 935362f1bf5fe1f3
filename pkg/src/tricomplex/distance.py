"""Distance estimates to Julia sets, Multibrots and their tricomplex slices.

For an escaped orbit with final iterate z_m and derivative z'_m, the distance
from the starting point to the set lies (asymptotically in m) between

    lower = |z_m| ln|z_m| / (2 |z_m|**(1/p**k) |z'_m|)
    upper = 2 |z_m| ln|z_m| / |z'_m|

with k = m for Julia orbits and k = m - 1 for critical orbits.  Both are
evaluated from ln|z_m| and ln|z'_m| so deep escapes never overflow.

A tricomplex set that is a product of its four idempotent factor sets is at
distance sqrt(sum d_gamma**2 / 4) from a point, where d_gamma are the
distances of the components to the factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import decompose
from . import _kernels
from .dynamics import IterConfig, OrbitResult, orbit_julia, orbit_multibrot
from .slices import Mode, SliceScene, embed

SAFETY_FACTOR = 0.5


@dataclass(frozen=True)
class DistanceBounds:
    lower: float
    upper: float
    interior: bool = False
    degenerate: bool = False

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper):
            raise ValueError(f"invalid bounds ({self.lower}, {self.upper})")
        if self.interior and (self.lower or self.upper):
            raise ValueError("interior bounds must be (0, 0)")

    @classmethod
    def inside(cls) -> "DistanceBounds":
        return cls(0.0, 0.0, True)

    def step(self, safety_factor: float = SAFETY_FACTOR) -> float:
        """Marching step: a fraction of the lower bound, since the estimate is not certified."""
        return safety_factor * self.lower


def bounds_from_orbit(orbit: OrbitResult, depth: int) -> DistanceBounds:
    if not orbit.escaped:
        return DistanceBounds.inside()
    log_z = orbit.log_magnitude
    if orbit.log_dz == -math.inf or log_z - orbit.log_dz > 700.0:
        return DistanceBounds(0.0, orbit.escape_radius, degenerate=True)
    ratio = math.exp(log_z - orbit.log_dz)
    lower = 0.5 * log_z * ratio * math.exp(-log_z * float(orbit.p) ** -depth)
    upper = 2.0 * log_z * ratio
    return DistanceBounds(lower, upper)


def julia_distance_bounds(z0: complex, c: complex, cfg: IterConfig) -> DistanceBounds:
    orbit = orbit_julia(z0, c, cfg)
    return bounds_from_orbit(orbit, orbit.m)


def multibrot_distance_bounds(c0: complex, cfg: IterConfig) -> DistanceBounds:
    orbit = orbit_multibrot(c0, cfg)
    return bounds_from_orbit(orbit, orbit.m - 1)


def aggregate_tricomplex(d: Sequence[float]) -> float:
    """sqrt(sum(d_gamma**2) / 4) over the four component distances."""
    if len(d) != 4:
        raise ValueError(f"expected four component distances, got {len(d)}")
    if any(not math.isfinite(x) or x < 0 for x in d):
        raise ValueError(f"component distances must be finite and >= 0, got {tuple(d)}")
    return math.sqrt(math.fsum(x * x for x in d) / 4)


def component_bounds(point3, scene: SliceScene, cfg: IterConfig | None = None) -> list[DistanceBounds]:
    """Per-component bounds of a slice point (the four idempotent factors)."""
    cfg = cfg or scene.cfg
    comps = decompose(embed(point3, scene.basis))
    if scene.mode is Mode.MULTIBROT:
        return [multibrot_distance_bounds(g, cfg) for g in comps]
    return [julia_distance_bounds(g, cz, cfg) for g, cz in zip(comps, decompose(scene.julia_c))]


def slice_distance(point3, scene: SliceScene, cfg: IterConfig | None = None) -> DistanceBounds:
    """Bounds on the distance from a point of a 3D slice to the tricomplex set.

    Components whose orbit stays bounded contribute 0 to both aggregates; the
    point is interior only when all four are.
    """
    parts = component_bounds(point3, scene, cfg)
    return combine(parts)


def combine(parts: Sequence[DistanceBounds]) -> DistanceBounds:
    if all(b.interior for b in parts):
        return DistanceBounds.inside()
    return DistanceBounds(
        aggregate_tricomplex([b.lower for b in parts]),
        aggregate_tricomplex([b.upper for b in parts]),
        degenerate=any(b.degenerate for b in parts),
    )


def slice_distance_field(points: np.ndarray, scene: SliceScene, cfg: IterConfig | None = None):
    """Compiled batch of :func:`slice_distance` over an ``(N, 3)`` array.

    Returns arrays (lower, upper, interior, degenerate, tint).
    """
    cfg = cfg or scene.cfg
    pts = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, 3))
    return _kernels.slice_bounds_batch(
        pts, scene.component_matrix, scene.component_constants, cfg.p, cfg.max_iter,
        cfg.escape_radius, scene.is_multibrot,
    )
