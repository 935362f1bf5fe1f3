"""Brute-force references: sampled membership grids and distances to them.

Nothing here touches the distance estimates or the idempotent
decomposition.  2D grids iterate plain complex orbits against the sharp
escape radius; 3D slice grids iterate the full 8-coefficient tricomplex
product and test the Euclidean norm.

Grid cache file layout (little-endian)::

    offset  size        field
    0       8           magic b"TCGRID\\x00\\x01"
    8       4   u32     dim (2 or 3)
    12      4   u32     max_iter
    16      8   f64     pitch
    24      8*dim f64   lower corner of the window
    ..      4*dim u32   samples per axis
    ..      ...         mask bits, C order, np.packbits(bitorder="little")
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numba
import numpy as np
from scipy.spatial import cKDTree

from .algebra import SIGN

MAGIC = b"TCGRID\x00\x01"
ORACLE_MAX_ITER = 4096
PITCH_2D = 1e-3
PITCH_3D = 1e-2


class OracleError(ValueError):
    pass


@dataclass
class MembershipGrid:
    """Samples at ``lo + index * pitch`` along each axis; ``mask`` marks members."""

    lo: tuple[float, ...]
    pitch: float
    mask: np.ndarray
    max_iter: int
    _trees: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.lo = tuple(float(x) for x in self.lo)
        self.mask = np.asarray(self.mask, dtype=bool)
        if not self.pitch > 0:
            raise OracleError(f"pitch must be positive, got {self.pitch}")
        if self.mask.ndim != len(self.lo):
            raise OracleError("mask dimensions do not match the window")

    @property
    def dim(self) -> int:
        return self.mask.ndim

    @property
    def hi(self) -> tuple[float, ...]:
        return tuple(l + (n - 1) * self.pitch for l, n in zip(self.lo, self.mask.shape))

    def axes(self) -> list[np.ndarray]:
        return [l + self.pitch * np.arange(n) for l, n in zip(self.lo, self.mask.shape)]

    def coordinates(self, index: np.ndarray) -> np.ndarray:
        return np.asarray(self.lo) + self.pitch * np.asarray(index, dtype=float)

    def nearest_index(self, q: np.ndarray) -> np.ndarray:
        idx = np.rint((np.asarray(q, dtype=float) - np.asarray(self.lo)) / self.pitch).astype(np.int64)
        return np.clip(idx, 0, np.array(self.mask.shape) - 1)

    def area(self) -> float:
        """Measure of the member set (area in 2D, volume in 3D)."""
        return float(self.mask.sum()) * self.pitch**self.dim

    def _edge(self, member: bool) -> np.ndarray:
        """Samples of one class with a neighbour of the other class (or on the window edge)."""
        cls = self.mask if member else ~self.mask
        edge = np.zeros_like(cls)
        for axis in range(self.dim):
            for shift in (1, -1):
                other = np.roll(cls, shift, axis=axis)
                sl = [slice(None)] * self.dim
                sl[axis] = 0 if shift == 1 else -1
                other[tuple(sl)] = False
                edge |= cls & ~other
        return edge

    def _tree(self, member: bool) -> cKDTree | None:
        if member not in self._trees:
            idx = np.argwhere(self._edge(member))
            self._trees[member] = cKDTree(self.coordinates(idx)) if len(idx) else None
        return self._trees[member]


def grid_distance(q: Sequence[float], grid: MembershipGrid) -> float:
    return float(grid_distances(np.asarray(q, dtype=float)[None, :], grid)[0])


def grid_distances(qs: np.ndarray, grid: MembershipGrid) -> np.ndarray:
    """Euclidean distance from each query to the nearest member sample.

    The nearest member is either the grid sample nearest to the query or a
    member with a non-member neighbour, so only those are searched.
    """
    qs = np.atleast_2d(np.asarray(qs, dtype=float))
    if not grid.mask.any():
        raise OracleError("membership grid has no member samples")
    tree = grid._tree(True)
    dist, _ = tree.query(qs)
    idx = grid.nearest_index(qs)
    near_member = grid.mask[tuple(idx.T)]
    near_dist = np.linalg.norm(qs - grid.coordinates(idx), axis=1)
    return np.where(near_member, np.minimum(dist, near_dist), dist)


def boundary_distances(qs: np.ndarray, grid: MembershipGrid) -> np.ndarray:
    """Distance from each query to the nearest sample of the opposite class.

    The class of a query is that of its nearest grid sample.  This is the
    oracle's estimate of the distance to the set's boundary.
    """
    qs = np.atleast_2d(np.asarray(qs, dtype=float))
    idx = grid.nearest_index(qs)
    inside = grid.mask[tuple(idx.T)]
    out = np.full(len(qs), np.inf)
    for member in (True, False):
        sel = inside == member
        tree = grid._tree(not member)
        if tree is not None and sel.any():
            out[sel] = tree.query(qs[sel])[0]
    return out


def _window_axes(lo: Sequence[float], hi: Sequence[float], pitch: float) -> list[np.ndarray]:
    axes = []
    for a, b in zip(lo, hi):
        n = int(math.floor((b - a) / pitch + 1e-9)) + 1
        axes.append(a + pitch * np.arange(n))
    return axes


@numba.njit(parallel=True, cache=True)
def _complex_grid(xs, ys, c, p, max_iter, critical):
    out = np.zeros((xs.shape[0], ys.shape[0]), dtype=np.bool_)
    r = 2.0 ** (1.0 / (p - 1))
    if not critical:
        r = max(r, abs(c))
    r2 = r * r
    for iy in numba.prange(ys.shape[0]):
        for ix in range(xs.shape[0]):
            z0 = complex(xs[ix], ys[iy])
            cc = z0 if critical else c
            z = z0
            bounded = True
            for _ in range(max_iter):
                if z.real * z.real + z.imag * z.imag > r2:
                    bounded = False
                    break
                w = z
                for _k in range(p - 1):
                    w = w * z
                z = w + cc
            out[ix, iy] = bounded
    return out


def multibrot_grid(p: int, window: Sequence[float], pitch: float = PITCH_2D,
                   max_iter: int = ORACLE_MAX_ITER) -> MembershipGrid:
    """Sampled complex Multibrot; window is (x0, y0, x1, y1)."""
    x0, y0, x1, y1 = window
    xs, ys = _window_axes((x0, y0), (x1, y1), pitch)
    mask = _complex_grid(xs, ys, 0j, int(p), int(max_iter), True)
    return MembershipGrid((x0, y0), pitch, mask, max_iter)


def julia_grid(p: int, c: complex, window: Sequence[float], pitch: float = PITCH_2D,
               max_iter: int = ORACLE_MAX_ITER) -> MembershipGrid:
    x0, y0, x1, y1 = window
    xs, ys = _window_axes((x0, y0), (x1, y1), pitch)
    mask = _complex_grid(xs, ys, complex(c), int(p), int(max_iter), False)
    return MembershipGrid((x0, y0), pitch, mask, max_iter)


_SIGN = SIGN.astype(np.float64)


@numba.njit(cache=True)
def _tc_member(c, start, p, max_iter, threshold2, sign):
    z = start.copy()
    w = np.empty(8)
    tmp = np.empty(8)
    for _ in range(max_iter):
        for i in range(8):
            w[i] = z[i]
        for _k in range(p - 1):
            for i in range(8):
                tmp[i] = 0.0
            for i in range(8):
                wi = w[i]
                if wi == 0.0:
                    continue
                for j in range(8):
                    zj = z[j]
                    if zj != 0.0:
                        tmp[i ^ j] += sign[i, j] * wi * zj
            for i in range(8):
                w[i] = tmp[i]
        n2 = 0.0
        for i in range(8):
            z[i] = w[i] + c[i]
            n2 += z[i] * z[i]
        if n2 > threshold2:
            return False
    return True


@numba.njit(parallel=True, cache=True)
def _tc_members(coeffs, julia_c, p, max_iter, threshold2, sign, julia):
    n = coeffs.shape[0]
    out = np.empty(n, dtype=np.bool_)
    for k in numba.prange(n):
        if julia:
            z0 = coeffs[k]
            n2 = 0.0
            for i in range(8):
                n2 += z0[i] * z0[i]
            out[k] = n2 <= threshold2 and _tc_member(julia_c, z0, p, max_iter, threshold2, sign)
        else:
            out[k] = _tc_member(coeffs[k], np.zeros(8), p, max_iter, threshold2, sign)
    return out


def _basis_matrix(basis) -> np.ndarray:
    mat = np.zeros((3, 8))
    for row, u in enumerate(basis):
        mat[row, u.index] = 1.0
    return mat


def tricomplex_members(coeffs: np.ndarray, p: int, max_iter: int = ORACLE_MAX_ITER,
                       julia_c=None) -> np.ndarray:
    """Membership by direct tricomplex iteration of ``(N, 8)`` coefficient rows.

    Multibrot: c is a member iff ||f_c^m(0)|| <= 2**(1/(p-1)) for all m.
    Julia: the orbit of z escapes iff its norm ever exceeds
    max(2 ||c||, 2**(1/(p-1))), a bound on every component escape radius.
    """
    coeffs = np.ascontiguousarray(np.atleast_2d(np.asarray(coeffs, dtype=float)))
    r = 2.0 ** (1.0 / (p - 1))
    if julia_c is None:
        return _tc_members(coeffs, np.zeros(8), int(p), int(max_iter), r * r, _SIGN, False)
    cvec = np.asarray(tuple(julia_c), dtype=float)
    t = max(2.0 * float(np.linalg.norm(cvec)), r)
    return _tc_members(coeffs, cvec, int(p), int(max_iter), t * t, _SIGN, True)


def slice_oracle_members(points: np.ndarray, basis, p: int, max_iter: int = ORACLE_MAX_ITER,
                         julia_c=None) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    coeffs = pts.reshape(-1, 3) @ _basis_matrix(basis)
    return tricomplex_members(coeffs, p, max_iter, julia_c).reshape(pts.shape[:-1])


@numba.njit(parallel=True, cache=True)
def _local_search(coeffs, offsets, radii, julia_c, p, max_iter, threshold2, sign, julia):
    n = coeffs.shape[0]
    out = np.full(n, np.inf)
    for k in numba.prange(n):
        for m in range(offsets.shape[0]):
            z0 = coeffs[k] + offsets[m]
            if julia:
                n2 = 0.0
                for i in range(8):
                    n2 += z0[i] * z0[i]
                member = n2 <= threshold2 and _tc_member(julia_c, z0, p, max_iter, threshold2, sign)
            else:
                member = _tc_member(z0, np.zeros(8), p, max_iter, threshold2, sign)
            if member:
                out[k] = radii[m]
                break
    return out


def local_member_distance(points: np.ndarray, basis, p: int, radius: float, pitch: float,
                          max_iter: int = ORACLE_MAX_ITER, julia_c=None) -> np.ndarray:
    """Distance from each slice point to the nearest member on a local lattice.

    The lattice has spacing ``pitch``, is centred on the query point and is cut
    to the ball of the given radius; samples are tried nearest first.  Returns
    inf where the ball holds no member sample.
    """
    n = int(math.floor(radius / pitch))
    ticks = np.arange(-n, n + 1) * pitch
    grid = np.stack(np.meshgrid(ticks, ticks, ticks, indexing="ij"), axis=-1).reshape(-1, 3)
    radii = np.linalg.norm(grid, axis=1)
    keep = radii <= radius * (1 + 1e-12)
    order = np.argsort(radii[keep], kind="stable")
    mat = _basis_matrix(basis)
    offsets = np.ascontiguousarray(grid[keep][order] @ mat)
    radii = np.ascontiguousarray(radii[keep][order])
    coeffs = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, 3) @ mat)
    r = 2.0 ** (1.0 / (p - 1))
    if julia_c is None:
        return _local_search(coeffs, offsets, radii, np.zeros(8), int(p), int(max_iter), r * r, _SIGN, False)
    cvec = np.asarray(tuple(julia_c), dtype=float)
    t = max(2.0 * float(np.linalg.norm(cvec)), r)
    return _local_search(coeffs, offsets, radii, cvec, int(p), int(max_iter), t * t, _SIGN, True)


def slice_grid(basis, p: int, box: Sequence[float], pitch: float = PITCH_3D,
               max_iter: int = ORACLE_MAX_ITER, julia_c=None,
               mirror: Sequence[int] = ()) -> MembershipGrid:
    """Sampled 3D slice; box is (x0, y0, z0, x1, y1, z1).

    Axes listed in ``mirror`` must be symmetric in the box (x0 == -x1 etc.);
    only their non-negative half is iterated and the result is reflected.
    Use this only where a sign-flip automorphism of the algebra maps the
    slice onto itself, so the reflected orbits are exact negations.
    """
    lo, hi = list(box[:3]), list(box[3:])
    for axis in mirror:
        if lo[axis] != -hi[axis]:
            raise OracleError(f"mirrored axis {axis} needs a symmetric range, got {lo[axis]}..{hi[axis]}")
    axes = _window_axes(lo, hi, pitch)
    for axis in mirror:
        n = int(math.floor(hi[axis] / pitch + 1e-9))
        axes[axis] = pitch * np.arange(-n, n + 1)
        lo[axis] = -n * pitch
    half = [ax[len(ax) // 2:] if k in mirror else ax for k, ax in enumerate(axes)]
    mesh = np.stack(np.meshgrid(*half, indexing="ij"), axis=-1)
    mask = slice_oracle_members(mesh, basis, p, max_iter, julia_c)
    for axis in mirror:
        mask = np.concatenate([np.flip(mask, axis=axis), np.delete(mask, 0, axis=axis)], axis=axis)
    return MembershipGrid(tuple(lo), pitch, mask, max_iter)


def _real_bounded(x: float, p: int, max_iter: int) -> bool:
    r = 2.0 ** (1.0 / (p - 1))
    z = x
    for _ in range(max_iter):
        if abs(z) > r:
            return False
        z = z**p + x
    return True


def real_multibrot_interval(p: int, cfg=None, tol: float = 1e-12) -> tuple[float, float]:
    """Endpoints of the real segment of the Multibrot of order p, by bisection."""
    if p < 2:
        raise OracleError(f"power p must be >= 2, got {p}")
    max_iter = cfg.max_iter if cfg is not None else ORACLE_MAX_ITER
    outer = 2.0 ** (1.0 / (p - 1)) + 0.1

    def bisect(inside: float, outside: float) -> float:
        while abs(outside - inside) > tol:
            mid = 0.5 * (inside + outside)
            if _real_bounded(mid, p, max_iter):
                inside = mid
            else:
                outside = mid
        return inside

    return bisect(0.0, -outer), bisect(0.0, outer)


def save_grid(path: str | Path, grid: MembershipGrid) -> None:
    header = MAGIC + struct.pack("<IId", grid.dim, grid.max_iter, grid.pitch)
    header += struct.pack(f"<{grid.dim}d", *grid.lo)
    header += struct.pack(f"<{grid.dim}I", *grid.mask.shape)
    bits = np.packbits(grid.mask.ravel(order="C"), bitorder="little")
    Path(path).write_bytes(header + bits.tobytes())


def load_grid(path: str | Path) -> MembershipGrid:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise OracleError(f"{path}: not a membership grid file")
    dim, max_iter, pitch = struct.unpack_from("<IId", data, 8)
    offset = 24
    lo = struct.unpack_from(f"<{dim}d", data, offset)
    offset += 8 * dim
    shape = struct.unpack_from(f"<{dim}I", data, offset)
    offset += 4 * dim
    count = int(np.prod(shape))
    bits = np.frombuffer(data, dtype=np.uint8, offset=offset)
    mask = np.unpackbits(bits, count=count, bitorder="little").astype(bool).reshape(shape)
    return MembershipGrid(lo, pitch, mask, max_iter)
