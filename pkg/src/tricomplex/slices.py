"""3D principal slices: the real span of three distinct basis units.

A point (x, y, z) of the slice over units (u1, u2, u3) is the tricomplex
number x u1 + y u2 + z u3.  Because the embedding is linear, each idempotent
component of the embedded point is a fixed complex linear form in (x, y, z);
:attr:`SliceBasis.component_matrix` holds those forms for the compiled paths.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import Tricomplex, Unit, decompose, decompose_array
from .dynamics import (
    IterConfig,
    critical_radius,
    in_julia3,
    in_multibrot,
    in_multibrot3,
    in_multibrot_real,
    julia3_members,
    multibrot3_members,
    multibrot_members,
)


class Mode(str, Enum):
    MULTIBROT = "multibrot"
    JULIA = "julia"


@dataclass(frozen=True)
class SliceBasis:
    u1: Unit
    u2: Unit
    u3: Unit

    def __post_init__(self):
        units = tuple(Unit.parse(u) for u in (self.u1, self.u2, self.u3))
        if len(set(units)) != 3:
            raise ValueError(
                "slice units must be pairwise distinct, got " + ", ".join(u.value for u in units)
            )
        for name, u in zip(("u1", "u2", "u3"), units):
            object.__setattr__(self, name, u)

    @classmethod
    def parse(cls, text: str | Sequence[str]) -> "SliceBasis":
        tokens = text.split(",") if isinstance(text, str) else list(text)
        if len(tokens) != 3:
            raise ValueError(f"a slice basis needs exactly three units, got {len(tokens)}")
        return cls(*tokens)

    def __iter__(self):
        return iter((self.u1, self.u2, self.u3))

    def __str__(self):
        return ",".join(u.value for u in self)

    @cached_property
    def embedding_matrix(self) -> np.ndarray:
        """(3, 8) matrix taking slice coordinates to tricomplex coefficients."""
        mat = np.zeros((3, 8))
        for row, u in enumerate(self):
            mat[row, u.index] = 1.0
        return mat

    @cached_property
    def component_matrix(self) -> np.ndarray:
        """(4, 3) complex matrix taking slice coordinates to idempotent components."""
        return np.ascontiguousarray(decompose_array(self.embedding_matrix).T)


TETRABROT = SliceBasis(Unit.ONE, Unit.I1, Unit.I2)
AIRBROT = SliceBasis(Unit.ONE, Unit.J1, Unit.J2)
ARROWHEADBROT = SliceBasis(Unit.ONE, Unit.I1, Unit.J1)


@dataclass(frozen=True)
class SliceScene:
    basis: SliceBasis = TETRABROT
    mode: Mode = Mode.MULTIBROT
    cfg: IterConfig = field(default_factory=IterConfig)
    julia_c: Tricomplex | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.JULIA and self.julia_c is None:
            raise ValueError("a Julia slice needs the constant julia_c")
        if self.mode is Mode.MULTIBROT and self.julia_c is not None:
            raise ValueError("julia_c is only meaningful in Julia mode")

    @property
    def p(self) -> int:
        return self.cfg.p

    @property
    def is_multibrot(self) -> bool:
        return self.mode is Mode.MULTIBROT

    @property
    def component_matrix(self) -> np.ndarray:
        return self.basis.component_matrix

    @cached_property
    def component_constants(self) -> np.ndarray:
        if self.julia_c is None:
            return np.zeros(4, dtype=complex)
        return np.array(decompose(self.julia_c), dtype=complex)

    @property
    def set_radius(self) -> float:
        """Radius of a ball about the origin containing the whole set.

        Every idempotent component of a member lies in a disc of radius
        R_gamma, so the Euclidean norm (the RMS of component moduli) is at most
        the largest R_gamma.
        """
        r = critical_radius(self.p)
        if self.is_multibrot:
            return r
        return max(max(abs(c), r) for c in self.component_constants)


def embed(v: Sequence[float], basis: SliceBasis) -> Tricomplex:
    x, y, z = (float(t) for t in v)
    coeffs = [0.0] * 8
    for coord, u in zip((x, y, z), basis):
        coeffs[u.index] += coord
    return Tricomplex(tuple(coeffs))


def embed_array(points: np.ndarray, basis: SliceBasis) -> np.ndarray:
    """``(..., 3)`` slice coordinates -> ``(..., 8)`` coefficients."""
    return np.asarray(points, dtype=float) @ basis.embedding_matrix


def in_slice_multibrot(v: Sequence[float], scene: SliceScene) -> bool:
    return in_multibrot3(embed(v, scene.basis), scene.cfg)


def in_slice(v: Sequence[float], scene: SliceScene) -> bool:
    """Membership in the slice of the scene's set (Multibrot or Julia)."""
    if scene.is_multibrot:
        return in_slice_multibrot(v, scene)
    return in_julia3(embed(v, scene.basis), scene.julia_c, scene.cfg)


def slice_members(points: np.ndarray, scene: SliceScene) -> np.ndarray:
    """Vectorised :func:`in_slice` over ``(..., 3)`` points."""
    coeffs = embed_array(points, scene.basis)
    if scene.is_multibrot:
        return multibrot3_members(coeffs, scene.cfg)
    return julia3_members(coeffs, scene.julia_c, scene.cfg)


def tetrabrot_characterization(v: Sequence[float], p: int, cfg: IterConfig | None = None) -> bool:
    """Tetrabrot membership from its two distinct complex components.

    (x, y, z) is in T(1, i1, i2) iff both x + (y - z) i1 and x + (y + z) i1
    lie in the complex Multibrot of order p.
    """
    max_iter = cfg.max_iter if cfg else 256
    x, y, z = (float(t) for t in v)
    return in_multibrot(complex(x, y - z), p, max_iter) and in_multibrot(complex(x, y + z), p, max_iter)


def tetrabrot_members(points: np.ndarray, p: int, max_iter: int = 256) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    first = multibrot_members(x + 1j * (y - z), p, max_iter)
    second = multibrot_members(x + 1j * (y + z), p, max_iter)
    return first & second


def airbrot_characterization(v: Sequence[float], p: int, cfg: IterConfig | None = None) -> bool:
    """Airbrot membership from four real critical orbits.

    The components of x + y j1 + z j2 are the reals x +/- (y - z) and
    x +/- (y + z); each must lie on the real segment of the Multibrot.
    """
    max_iter = cfg.max_iter if cfg else 256
    x, y, z = (float(t) for t in v)
    return all(
        in_multibrot_real(w, p, max_iter)
        for w in (x + (y - z), x - (y - z), x + (y + z), x - (y + z))
    )
