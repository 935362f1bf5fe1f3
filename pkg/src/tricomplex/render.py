"""Sphere tracing of 3D slices and escape-time pictures of the complex sets."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .dynamics import IterConfig, critical_radius
from .pnm import Image
from .slices import SliceScene

TILE = 32
BOUND_MARGIN = 0.1


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0 or not np.isfinite(n):
        raise ValueError(f"cannot normalise vector {tuple(v)}")
    return v / n


@dataclass(frozen=True)
class Camera:
    position: tuple[float, float, float] = (2.6, -2.2, 1.8)
    look_at: tuple[float, float, float] = (-0.6, 0.0, 0.0)
    up: tuple[float, float, float] = (0.0, 0.0, 1.0)
    vfov_degrees: float = 45.0
    width: int = 256
    height: int = 256

    def __post_init__(self):
        for name in ("position", "look_at", "up"):
            vec = tuple(float(x) for x in getattr(self, name))
            if len(vec) != 3:
                raise ValueError(f"camera {name} must have 3 components")
            object.__setattr__(self, name, vec)
        forward = np.subtract(self.look_at, self.position)
        if not np.linalg.norm(forward) > 0:
            raise ValueError("camera position and look_at coincide")
        if np.linalg.norm(np.cross(forward, self.up)) <= 1e-12 * np.linalg.norm(forward) * np.linalg.norm(self.up):
            raise ValueError("camera up vector is parallel to the view direction")
        if not 0 < self.vfov_degrees < 180:
            raise ValueError(f"vfov must lie in (0, 180) degrees, got {self.vfov_degrees}")
        if self.width < 1 or self.height < 1:
            raise ValueError("image size must be positive")

    def frame(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        forward = _unit(np.subtract(self.look_at, self.position))
        right = _unit(np.cross(forward, self.up))
        up = np.cross(right, forward)
        return forward, right, up

    def rays(self, rows: slice = slice(None), cols: slice = slice(None)):
        """Origins and unit directions through pixel centres, shape (h, w, 3)."""
        forward, right, up = self.frame()
        half = math.tan(math.radians(self.vfov_degrees) / 2)
        aspect = self.width / self.height
        r = np.arange(self.height)[rows]
        c = np.arange(self.width)[cols]
        sx = (2 * (c + 0.5) / self.width - 1) * half * aspect
        sy = (1 - 2 * (r + 0.5) / self.height) * half
        dirs = forward + sx[None, :, None] * right + sy[:, None, None] * up
        dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
        origins = np.broadcast_to(np.asarray(self.position), dirs.shape)
        return np.ascontiguousarray(origins), np.ascontiguousarray(dirs)


@dataclass(frozen=True)
class RenderParams:
    epsilon: float | None = None
    max_steps: int = 512
    safety_factor: float = 0.5
    t_max: float = math.inf
    normal_h: float | None = None
    light_dir: tuple[float, float, float] | None = None
    background: tuple[int, int, int] = (16, 18, 28)
    workers: int = 1

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.safety_factor <= 1:
            raise ValueError("safety_factor must lie in (0, 1]")
        if self.max_steps < 1 or self.workers < 1:
            raise ValueError("max_steps and workers must be positive")

    def resolved_epsilon(self, scene: SliceScene) -> float:
        return self.epsilon if self.epsilon is not None else 1e-3 * scene.set_radius

    def resolved_h(self, scene: SliceScene) -> float:
        return self.normal_h if self.normal_h is not None else 2 * self.resolved_epsilon(scene)


@dataclass(frozen=True)
class RayHit:
    hit: bool
    point: tuple[float, float, float]
    steps: int
    distance_travelled: float
    normal: tuple[float, float, float] = (0.0, 0.0, 0.0)
    iteration_tint: float = 0.0


def bounding_radius(scene: SliceScene) -> float:
    return scene.set_radius + BOUND_MARGIN


def _kernel_args(scene: SliceScene, params: RenderParams):
    cfg = scene.cfg
    eps = params.resolved_epsilon(scene)
    return (
        scene.component_matrix, scene.component_constants, cfg.p, cfg.max_iter,
        cfg.escape_radius, scene.is_multibrot, bounding_radius(scene), eps,
        params.max_steps, params.safety_factor, params.t_max, params.resolved_h(scene),
    )


def march_rays(origins: np.ndarray, dirs: np.ndarray, scene: SliceScene, params: RenderParams):
    """Trace ``(N, 3)`` rays; returns (hit, points, normals, steps, travelled, tint) arrays."""
    origins = np.ascontiguousarray(np.asarray(origins, dtype=float).reshape(-1, 3))
    dirs = np.ascontiguousarray(np.asarray(dirs, dtype=float).reshape(-1, 3))
    args = _kernel_args(scene, params)
    return _kernels.march_batch(origins, dirs, *args[:8], *args[8:])


def march(origin: Sequence[float], direction: Sequence[float], scene: SliceScene,
          params: RenderParams | None = None) -> RayHit:
    params = params or RenderParams()
    d = _unit(direction)
    hit, pts, normals, steps, travelled, tint = march_rays(
        np.asarray(origin, dtype=float)[None], d[None], scene, params
    )
    return RayHit(
        bool(hit[0]), tuple(pts[0]), int(steps[0]), float(travelled[0]),
        tuple(normals[0]), float(tint[0]),
    )


def estimate_normal(point: Sequence[float], scene: SliceScene, h: float | None = None,
                    direction: Sequence[float] = (0.0, 0.0, 1.0)) -> np.ndarray:
    """Normalised central-difference gradient of the lower-bound field.

    Falls back to ``-direction`` when the gradient vanishes.
    """
    cfg = scene.cfg
    if h is None:
        h = RenderParams().resolved_h(scene)
    d = _unit(direction)
    nx, ny, nz, _ = _kernels.field_normal(
        float(point[0]), float(point[1]), float(point[2]), float(h), d[0], d[1], d[2],
        scene.component_matrix, scene.component_constants, cfg.p, cfg.max_iter,
        cfg.escape_radius, scene.is_multibrot,
    )
    return np.array([nx, ny, nz])


@dataclass
class HitBuffer:
    """Per-pixel marching results of a whole frame."""

    hit: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    steps: np.ndarray
    tint: np.ndarray
    dirs: np.ndarray = field(repr=False)


def _tiles(height: int, width: int, tile: int = TILE):
    for r0 in range(0, height, tile):
        for c0 in range(0, width, tile):
            yield slice(r0, min(r0 + tile, height)), slice(c0, min(c0 + tile, width))


def trace_frame(scene: SliceScene, camera: Camera, params: RenderParams | None = None) -> HitBuffer:
    """March every pixel ray, tile by tile; tiles never share pixels."""
    params = params or RenderParams()
    h, w = camera.height, camera.width
    buf = HitBuffer(
        hit=np.zeros((h, w), dtype=bool), points=np.zeros((h, w, 3)), normals=np.zeros((h, w, 3)),
        steps=np.zeros((h, w), dtype=np.int64), tint=np.zeros((h, w)), dirs=np.zeros((h, w, 3)),
    )

    def run(tile):
        rows, cols = tile
        origins, dirs = camera.rays(rows, cols)
        shape = dirs.shape[:2]
        hit, pts, normals, steps, _, tint = march_rays(origins, dirs, scene, params)
        buf.hit[rows, cols] = hit.reshape(shape)
        buf.points[rows, cols] = pts.reshape(shape + (3,))
        buf.normals[rows, cols] = normals.reshape(shape + (3,))
        buf.steps[rows, cols] = steps.reshape(shape)
        buf.tint[rows, cols] = tint.reshape(shape)
        buf.dirs[rows, cols] = dirs

    tiles = list(_tiles(h, w))
    if params.workers == 1:
        for tile in tiles:
            run(tile)
    else:
        with ThreadPoolExecutor(max_workers=params.workers) as pool:
            list(pool.map(run, tiles))
    return buf


def _palette(tint: np.ndarray) -> np.ndarray:
    cold = np.array([70.0, 110.0, 210.0])
    warm = np.array([250.0, 205.0, 110.0])
    s = np.sqrt(np.clip(tint, 0.0, 1.0))[..., None]
    return cold + (warm - cold) * s


def shade(buf: HitBuffer, camera: Camera, params: RenderParams) -> Image:
    if params.light_dir is None:
        forward, right, up = camera.frame()
        light = _unit(-forward + 0.6 * up - 0.4 * right)
    else:
        light = _unit(params.light_dir)
    lambert = np.clip(buf.normals @ light, 0.0, 1.0)
    rgb = _palette(buf.tint) * (0.18 + 0.82 * lambert)[..., None]
    out = np.empty(buf.hit.shape + (3,), dtype=np.uint8)
    out[...] = np.asarray(params.background, dtype=np.uint8)
    out[buf.hit] = np.clip(np.rint(rgb[buf.hit]), 0, 255).astype(np.uint8)
    return Image(out)


def render(scene: SliceScene, camera: Camera, params: RenderParams | None = None) -> Image:
    params = params or RenderParams()
    return shade(trace_frame(scene, camera, params), camera, params)


@dataclass(frozen=True)
class FigureKind:
    """Which complex set a 2D figure shows: the Multibrot of order p or a filled Julia set."""

    name: str
    p: int
    c: complex | None = None

    def __post_init__(self):
        if self.name not in ("multibrot", "julia"):
            raise ValueError(f"figure kind must be 'multibrot' or 'julia', got {self.name!r}")
        if self.p < 2:
            raise ValueError("power p must be >= 2")
        if (self.name == "julia") != (self.c is not None):
            raise ValueError("a Julia figure needs c; a Multibrot figure takes none")

    @classmethod
    def multibrot(cls, p: int) -> "FigureKind":
        return cls("multibrot", p)

    @classmethod
    def julia(cls, p: int, c: complex) -> "FigureKind":
        return cls("julia", p, complex(c))


def pixel_grid(window: Sequence[float], resolution: tuple[int, int]) -> np.ndarray:
    """Complex pixel centres, row 0 at the top; rows are mirror images for y0 = -y1."""
    x0, y0, x1, y1 = map(float, window)
    w, h = resolution
    if not (x1 > x0 and y1 > y0 and w > 0 and h > 0):
        raise ValueError(f"bad window {window} or resolution {resolution}")
    dx = (x1 - x0) / w
    dy = (y1 - y0) / h
    xs = 0.5 * (x0 + x1) + ((np.arange(w) - (w - 1) / 2)) * dx
    ys = 0.5 * (y0 + y1) + (((h - 1) / 2 - np.arange(h))) * dy
    return xs[None, :] + 1j * ys[:, None]


def render_complex_figure(kind: FigureKind, window: Sequence[float],
                          resolution: tuple[int, int] = (512, 512),
                          max_iter: int = 256) -> Image:
    """Grayscale escape-time picture with distance-estimate shading.

    Members are black (0); outside points brighten with their lower distance
    bound measured in pixels, so the boundary shows as a dark rim.
    """
    zs = pixel_grid(window, resolution)
    cfg = IterConfig(kind.p, max_iter)
    multibrot = kind.name == "multibrot"
    lower, _, interior, _ = _kernels.complex_bounds_batch(
        np.ascontiguousarray(zs.ravel()), 0j if multibrot else kind.c, cfg.p, cfg.max_iter,
        cfg.escape_radius, multibrot,
    )
    pixel = (window[2] - window[0]) / resolution[0]
    level = np.tanh(lower / (6.0 * pixel)) ** 0.5
    value = np.where(interior, 0, 1 + np.rint(254 * level)).astype(np.uint8)
    return Image(value.reshape(zs.shape))


def default_window(kind: FigureKind) -> tuple[float, float, float, float]:
    r = critical_radius(kind.p) if kind.name == "multibrot" else max(abs(kind.c), critical_radius(kind.p))
    if kind.name == "multibrot" and kind.p == 2:
        return (-2.1, -1.2, 0.7, 1.2)
    return (-r - 0.1, -r - 0.1, r + 0.1, r + 0.1)
