"""Orbits of f_c(z) = z**p + c with derivative tracking, and membership tests.

Membership uses the sharp escape radii: an orbit that ever leaves the disc of
radius ``max(|c|, 2**(1/(p-1)))`` (Julia) or ``2**(1/(p-1))`` (critical
orbit) is unbounded.  Orbits feeding distance estimates run against the much
larger :attr:`IterConfig.escape_radius` so that ``ln|z_m| / p**m`` is a good
approximation of the Green's function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .algebra import Tricomplex, decompose, decompose_array

# ln(1e100); refinement steps after escape stop before |z| would pass 1e100
LOG_CAP = _kernels.LOG_CAP
REFINE_STEPS = 3
_DZ_RESCALE = 1e150
_LOG_DZ_RESCALE = math.log(_DZ_RESCALE)


def critical_radius(p: int) -> float:
    """2**(1/(p-1)), the escape radius of the critical orbit."""
    return 2.0 ** (1.0 / (p - 1))


@dataclass(frozen=True)
class IterConfig:
    p: int = 2
    max_iter: int = 256
    escape_radius: float = 1e8

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, (int, np.integer)) or self.p < 2:
            raise ValueError(f"power p must be an integer >= 2, got {self.p!r}")
        if isinstance(self.max_iter, bool) or not isinstance(self.max_iter, (int, np.integer)) \
                or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if not self.escape_radius > critical_radius(self.p):
            raise ValueError(
                f"escape_radius must exceed 2**(1/(p-1)) = {critical_radius(self.p):.6g}, "
                f"got {self.escape_radius!r}"
            )
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "max_iter", int(self.max_iter))
        object.__setattr__(self, "escape_radius", float(self.escape_radius))


ORACLE_MAX_ITER = 4096


@dataclass(frozen=True)
class OrbitResult:
    """Where an orbit stopped.

    ``dz_m`` is the derivative of the m-th iterate (with respect to z0 for
    Julia orbits, to c for critical orbits).  ``log_dz`` is ``ln|dz_m|``,
    kept separately because the derivative is rescaled internally when it
    grows past 1e150; ``dz_m`` is then only its direction times 1e150**k.
    """

    escaped: bool
    m: int
    z_m: complex
    dz_m: complex
    log_magnitude: float
    log_dz: float
    escape_radius: float
    p: int

    @property
    def smooth_count(self) -> float:
        """Continuous escape count m - log_p(ln|z_m| / ln R)."""
        if not self.escaped:
            return float(self.m)
        return self.m - math.log(self.log_magnitude / math.log(self.escape_radius)) / math.log(self.p)


def escape_radius_julia(p: int, c: complex) -> float:
    if p < 2:
        raise ValueError(f"power p must be an integer >= 2, got {p!r}")
    return max(abs(c), critical_radius(p))


def working_radius(escape_radius: float, p: int, sharp: float) -> float:
    """Escape radius actually used for derivative-tracking orbits.

    Capped so that one more power of an unescaped iterate stays below 1e250,
    but never below the sharp radius.
    """
    return max(min(escape_radius, 10.0 ** (250.0 / p)), sharp)


def _iterate(z, dz, c, p, m, max_iter, radius, critical):
    shift = 0.0
    extra = 0
    escaped = abs(z) > radius
    while m < max_iter:
        if escaped:
            if extra >= REFINE_STEPS or p * math.log(abs(z)) >= LOG_CAP:
                break
            extra += 1
        zp = z ** (p - 1)
        dz = p * zp * dz + (math.exp(-shift) if critical else 0.0)
        z = zp * z + c
        m += 1
        if abs(dz) > _DZ_RESCALE:
            dz /= _DZ_RESCALE
            shift += _LOG_DZ_RESCALE
        escaped = escaped or abs(z) > radius
    log_z = math.log(abs(z)) if z != 0 else -math.inf
    log_dz = math.log(abs(dz)) + shift if dz != 0 else -math.inf
    return escaped, m, z, dz, log_z, log_dz


def orbit_julia(z0: complex, c: complex, cfg: IterConfig) -> OrbitResult:
    """Iterate f_c from z0, tracking d f_c^m / d z0 (starting from 1)."""
    p = cfg.p
    radius = working_radius(cfg.escape_radius, p, escape_radius_julia(p, c))
    escaped, m, z, dz, log_z, log_dz = _iterate(
        complex(z0), 1.0 + 0.0j, complex(c), p, 0, cfg.max_iter, radius, False
    )
    return OrbitResult(escaped, m, z, dz, log_z, log_dz, radius, p)


def orbit_multibrot(c0: complex, cfg: IterConfig) -> OrbitResult:
    """Critical orbit c_m = f_{c0}^m(0), starting at c_1 = c0 with dc_1 = 1."""
    p = cfg.p
    radius = working_radius(cfg.escape_radius, p, critical_radius(p))
    c0 = complex(c0)
    escaped, m, z, dz, log_z, log_dz = _iterate(c0, 1.0 + 0.0j, c0, p, 1, cfg.max_iter, radius, True)
    return OrbitResult(escaped, m, z, dz, log_z, log_dz, radius, p)


def in_multibrot(c: complex, p: int, max_iter: int = 256) -> bool:
    """c is kept iff |f_c^m(0)| <= 2**(1/(p-1)) for m = 1..max_iter."""
    r = critical_radius(p)
    z = complex(c)
    for _ in range(max_iter):
        if abs(z) > r:
            return False
        z = z**p + c
    return True


def in_julia(z: complex, c: complex, p: int, max_iter: int = 256) -> bool:
    r = escape_radius_julia(p, c)
    z = complex(z)
    for _ in range(max_iter):
        if abs(z) > r:
            return False
        z = z**p + c
    return True


def in_multibrot_real(x: float, p: int, max_iter: int = 256) -> bool:
    """Membership of a real parameter, iterating the real orbit only."""
    r = critical_radius(p)
    z = float(x)
    for _ in range(max_iter):
        if abs(z) > r:
            return False
        z = z**p + x
    return True


def in_multibrot3(c: Tricomplex, cfg: IterConfig) -> bool:
    """Tricomplex Multibrot membership, one complex critical orbit per idempotent component."""
    return all(in_multibrot(g, cfg.p, cfg.max_iter) for g in decompose(c))


def in_julia3(eta: Tricomplex, c: Tricomplex, cfg: IterConfig) -> bool:
    return all(
        in_julia(z, cz, cfg.p, cfg.max_iter) for z, cz in zip(decompose(eta), decompose(c))
    )


def multibrot_members(cs: np.ndarray, p: int, max_iter: int = 256) -> np.ndarray:
    """Vectorised :func:`in_multibrot` over an array of complex parameters."""
    cs = np.asarray(cs, dtype=complex)
    flat = _kernels.multibrot_member_batch(np.ascontiguousarray(cs.ravel()), int(p), int(max_iter))
    return flat.reshape(cs.shape)


def julia_members(zs: np.ndarray, c: complex, p: int, max_iter: int = 256) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    flat = _kernels.julia_member_batch(np.ascontiguousarray(zs.ravel()), complex(c), int(p), int(max_iter))
    return flat.reshape(zs.shape)


def multibrot3_members(coeffs: np.ndarray, cfg: IterConfig) -> np.ndarray:
    """Vectorised :func:`in_multibrot3` over ``(..., 8)`` coefficient arrays."""
    comps = decompose_array(coeffs)
    inside = multibrot_members(comps, cfg.p, cfg.max_iter)
    return inside.all(axis=-1)


def julia3_members(coeffs: np.ndarray, c: Tricomplex, cfg: IterConfig) -> np.ndarray:
    comps = decompose_array(coeffs)
    inside = np.ones(comps.shape[:-1], dtype=bool)
    for k, cz in enumerate(decompose(c)):
        inside &= julia_members(comps[..., k], cz, cfg.p, cfg.max_iter)
    return inside
