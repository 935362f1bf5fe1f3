import math

import numpy as np
import pytest

from tricomplex.distance import slice_distance_field
from tricomplex.dynamics import IterConfig
from tricomplex.oracle import real_multibrot_interval, slice_oracle_members
from tricomplex.pnm import Image, read_pnm
from tricomplex.render import (
    Camera,
    FigureKind,
    RenderParams,
    bounding_radius,
    estimate_normal,
    march,
    pixel_grid,
    render,
    render_complex_figure,
    trace_frame,
)
from tricomplex.slices import AIRBROT, TETRABROT, SliceScene, slice_members

SCENE = SliceScene(TETRABROT)


def angle_deg(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return math.degrees(math.acos(np.clip(a @ b / np.linalg.norm(a) / np.linalg.norm(b), -1, 1)))


def test_camera_validation():
    with pytest.raises(ValueError, match="coincide"):
        Camera(position=(1, 1, 1), look_at=(1, 1, 1))
    with pytest.raises(ValueError, match="parallel"):
        Camera(position=(0, 0, 3), look_at=(0, 0, 0), up=(0, 0, 1))
    with pytest.raises(ValueError, match="vfov"):
        Camera(vfov_degrees=180)
    with pytest.raises(ValueError):
        Camera(width=0)


def test_rays_top_row_points_up():
    cam = Camera(position=(0, -3, 0), look_at=(0, 0, 0), up=(0, 0, 1), width=5, height=5)
    _, dirs = cam.rays()
    assert np.allclose(np.linalg.norm(dirs, axis=-1), 1)
    assert np.allclose(dirs[2, 2], [0, 1, 0])
    assert dirs[0, 2, 2] > 0 > dirs[4, 2, 2]
    assert dirs[2, 4, 0] > 0 > dirs[2, 0, 0]


def test_march_hits_origin():
    hit = march((3.0, 0.0, 0.0), (-1.0, 0.0, 0.0), SCENE)
    assert hit.hit and hit.steps > 0
    assert np.linalg.norm(hit.normal) == pytest.approx(1, abs=1e-6)
    assert 0 <= hit.iteration_tint <= 1


def test_march_miss_outside_bounding_sphere():
    miss = march((5.0, 5.0, 0.0), (0.0, 0.0, 1.0), SCENE)
    assert not miss.hit and miss.steps == 0
    away = march((5.0, 0.0, 0.0), (1.0, 0.0, 0.0), SCENE)
    assert not away.hit and away.steps == 0


def test_march_respects_t_max_and_steps():
    short = march((3.0, 0.0, 0.0), (-1.0, 0.0, 0.0), SCENE, RenderParams(t_max=0.5))
    assert not short.hit
    few = march((3.0, 0.1, 0.0), (-1.0, 0.0, 0.0), SCENE, RenderParams(max_steps=2))
    assert not few.hit and few.steps == 2


def test_bounding_radius():
    assert bounding_radius(SCENE) == pytest.approx(2.1)
    assert bounding_radius(SliceScene(TETRABROT, cfg=IterConfig(p=3))) == pytest.approx(2**0.5 + 0.1)


def test_render_params_validation():
    with pytest.raises(ValueError):
        RenderParams(epsilon=0)
    with pytest.raises(ValueError):
        RenderParams(safety_factor=1.5)
    assert RenderParams().resolved_epsilon(SCENE) == pytest.approx(2e-3)
    assert RenderParams(epsilon=1e-3).resolved_h(SCENE) == 2e-3


def test_airbrot_face_normal():
    lo, hi = real_multibrot_interval(2)
    a, r = (lo + hi) / 2, (hi - lo) / 2
    scene = SliceScene(AIRBROT)
    for sy, sz in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
        face = np.array([1, sy, sz]) / math.sqrt(3)
        point = np.array([a, 0, 0]) + (r / 3) * np.array([1, sy, sz]) + 0.02 * face
        n = estimate_normal(point, scene, h=2e-3)
        assert angle_deg(n, face) < 5


def test_far_field_normal_is_radial():
    # on the real axis both components share a modulus, so the field is radial there
    on_axis = np.array([30.0, 0.0, 0.0])
    assert angle_deg(estimate_normal(on_axis, SCENE, h=1e-2), on_axis) < 0.1
    # elsewhere the components differ in modulus and the log factors tilt it slightly
    point = np.array([40.0, -25.0, 12.0])
    assert angle_deg(estimate_normal(point, SCENE, h=1e-2), point) < 10


def test_zero_gradient_falls_back_to_ray():
    n = estimate_normal((0, 0, 0), SCENE, direction=(0, 1, 0))
    assert np.allclose(n, [0, -1, 0])


def test_all_miss_frame_is_background():
    cam = Camera(position=(5, 0, 0), look_at=(10, 0, 0), width=16, height=16)
    params = RenderParams(background=(1, 2, 3))
    img = render(SCENE, cam, params)
    assert img.pixels.shape == (16, 16, 3)
    assert np.all(img.pixels == [1, 2, 3])


@pytest.fixture(scope="module")
def frame():
    cam = Camera(width=128, height=128)
    params = RenderParams(epsilon=1e-3)
    return cam, params, trace_frame(SCENE, cam, params)


def test_hit_fraction_in_sanity_band(frame):
    _, _, buf = frame
    assert 0.05 < buf.hit.mean() < 0.95
    norms = np.linalg.norm(buf.normals[buf.hit], axis=1)
    assert np.allclose(norms, 1, atol=1e-6)
    assert np.all((buf.tint >= 0) & (buf.tint <= 1))


def test_step_off_surface_is_exterior(frame):
    _, params, buf = frame
    pts = buf.points[buf.hit] + 1e-3 * buf.normals[buf.hit]
    inside = slice_members(pts, SCENE)
    assert inside.mean() <= 0.05


def test_render_deterministic_across_runs_and_workers(tmp_path):
    cam = Camera(width=64, height=48)
    a = render(SCENE, cam, RenderParams(workers=1))
    b = render(SCENE, cam, RenderParams(workers=1))
    c = render(SCENE, cam, RenderParams(workers=3))
    assert a.to_bytes() == b.to_bytes() == c.to_bytes()
    path = a.save(tmp_path / "x.ppm")
    assert path.read_bytes().startswith(b"P6\n64 48\n255\n")
    assert len(path.read_bytes()) == len(b"P6\n64 48\n255\n") + 64 * 48 * 3
    assert np.array_equal(read_pnm(path).pixels, a.pixels)


def test_resolution_scaling_silhouette():
    low = trace_frame(SCENE, Camera(width=64, height=64)).hit
    high = trace_frame(SCENE, Camera(width=256, height=256)).hit
    pooled = high.reshape(64, 4, 64, 4).any(axis=(1, 3))
    grown = pooled.copy()
    for axis in (0, 1):
        for shift in (1, -1):
            grown |= np.roll(pooled, shift, axis=axis)
    assert not np.any(low & ~grown)


def test_no_overshoot_statistical():
    rng = np.random.default_rng(21)
    n = 10_000
    eps = 1e-3
    origins = rng.normal(size=(n, 3))
    origins *= 3.0 / np.linalg.norm(origins, axis=1, keepdims=True)
    targets = rng.uniform(-0.8, 0.8, size=(n, 3))
    dirs = targets - origins
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    t = np.zeros(n)
    active = np.ones(n, dtype=bool)
    flagged = []
    for _ in range(200):
        idx = np.flatnonzero(active)
        if not len(idx):
            break
        pts = origins[idx] + t[idx, None] * dirs[idx]
        lower, _, inside, _, _ = slice_distance_field(pts, SCENE)
        done = inside | (lower < eps) | (t[idx] > 6.0)
        step = 0.5 * lower
        far = (~done) & (lower > 10 * eps)
        landing = origins[idx] + (t[idx] + step)[:, None] * dirs[idx]
        flagged.append(landing[far])
        t[idx] += np.where(done, 0.0, step)
        active[idx[done]] = False
    landings = np.concatenate(flagged)
    assert len(landings) > n
    overshoot = slice_oracle_members(landings, TETRABROT, 2, 4096)
    assert not overshoot.any()


def test_complex_figure_basics():
    img = render_complex_figure(FigureKind.julia(2, 0), (-1.5, -1.5, 1.5, 1.5), (101, 101))
    assert img.grayscale and img.pixels.shape == (101, 101)
    zs = pixel_grid((-1.5, -1.5, 1.5, 1.5), (101, 101))
    disk = np.abs(zs) < 0.99
    ring = np.abs(zs) > 1.01
    assert np.all(img.pixels[disk] == 0) and np.all(img.pixels[ring] >= 1)


def test_figure_conjugation_symmetry():
    img = render_complex_figure(FigureKind.multibrot(3), (-1.2, -1.3, 1.2, 1.3), (120, 130))
    assert np.array_equal(img.pixels, img.pixels[::-1])


def test_figure_kind_validation():
    with pytest.raises(ValueError):
        FigureKind("julia", 2)
    with pytest.raises(ValueError):
        FigureKind("multibrot", 2, 0.1)
    with pytest.raises(ValueError):
        FigureKind("mandel", 2)
    with pytest.raises(ValueError):
        pixel_grid((1, 0, 0, 1), (10, 10))


def test_pgm_header(tmp_path):
    img = Image(np.arange(12, dtype=np.uint8).reshape(3, 4))
    data = img.save(tmp_path / "g.pgm").read_bytes()
    assert data == b"P5\n4 3\n255\n" + bytes(range(12))
    assert img.rows()[1] == [4, 5, 6, 7]
