"""Acceptance criteria, one test each; the summary prints a PASS/FAIL line per criterion."""
import math
import os
import time

import numpy as np
import pytest

from conftest import M2_WINDOW, M3_WINDOW
from tricomplex.algebra import (
    Tricomplex,
    decompose_array,
    mul,
    mul_array,
    norm3,
    norm3_idempotent,
    reconstruct_array,
    unit,
)
from tricomplex.distance import julia_distance_bounds, multibrot_distance_bounds, slice_distance_field
from tricomplex.dynamics import IterConfig
from tricomplex.oracle import (
    boundary_distances,
    grid_distance,
    grid_distances,
    julia_grid,
    local_member_distance,
    real_multibrot_interval,
    slice_grid,
    slice_oracle_members,
)
from tricomplex.render import Camera, FigureKind, RenderParams, render, render_complex_figure, trace_frame
from tricomplex.slices import AIRBROT, TETRABROT, SliceScene, tetrabrot_characterization
from test_algebra import COLUMNS, TABLE, signed_unit

pytestmark = pytest.mark.acceptance


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def test_c1_algebra_exactness(acceptance):
    rng = np.random.default_rng(101)
    with Clock() as clock:
        table_ok = sum(mul(unit(r), unit(c)) == signed_unit(TABLE[r][k])
                       for r in COLUMNS for k, c in enumerate(COLUMNS))
        x = rng.uniform(-1, 1, size=(10_000, 8)) * 10.0 ** rng.uniform(-3, 3, size=(10_000, 1))
        back = reconstruct_array(decompose_array(x))
        # ulps are counted against the spacing at the largest coefficient of each value
        ulp = np.spacing(np.abs(x).max(axis=1, keepdims=True))
        worst_ulps = float((np.abs(back - x) / ulp).max())
        rel = max(abs(norm3(t) - norm3_idempotent(t)) / norm3(t)
                  for t in (Tricomplex(tuple(row)) for row in x[:2000]))
    passed = table_ok == 64 and worst_ulps <= 4 and rel <= 1e-12 and clock.seconds < 1
    acceptance(1, "algebra exactness", passed,
               f"{table_ok}/64 products, round trip {worst_ulps:.1f} ulp, norm paths {rel:.1e}", clock.seconds)
    assert passed


def _disk_samples(rng, shape, radius):
    return radius * np.sqrt(rng.uniform(size=shape)) * np.exp(2j * np.pi * rng.uniform(size=shape))


def test_c2_component_factorization(acceptance):
    rng = np.random.default_rng(102)
    worst = 0.0
    steps = 0
    with Clock() as clock, np.errstate(all="ignore"):
        for p in (2, 3, 4):
            n = 1000
            # draw the four components from a disk, so most orbits stay bounded for all 50 steps
            eta = reconstruct_array(_disk_samples(rng, (n, 4), 0.5))
            c = reconstruct_array(_disk_samples(rng, (n, 4), 0.3))
            z = eta.copy()
            g = decompose_array(eta)
            cg = decompose_array(c)
            alive = np.ones(n, dtype=bool)
            for _m in range(50):
                w = z
                for _k in range(p - 1):
                    w = mul_array(w, z)
                z = w + c
                g = g**p + cg
                alive &= np.abs(g).max(axis=1) <= 2.0 ** (1 / (p - 1))
                if not alive.any():
                    break
                scale = np.abs(g[alive]).max(axis=1)
                err = np.abs(decompose_array(z[alive]) - g[alive]).max(axis=1) / scale
                worst = max(worst, float(err.max()))
                steps += int(alive.sum())
    passed = worst <= 1e-9 and clock.seconds < 10
    acceptance(2, "component factorization", passed,
               f"max relative error {worst:.1e} over {steps} pre-escape iterates", clock.seconds)
    assert passed


def test_c3_unit_disk(acceptance):
    rng = np.random.default_rng(103)
    cfg = IterConfig(2, 256)
    bad_closed = bad_bracket = 0
    with Clock() as clock:
        r = rng.uniform(1.05, 4.0, size=100)
        theta = rng.uniform(0, 2 * np.pi, size=100)
        for radius, angle in zip(r, theta):
            b = julia_distance_bounds(radius * complex(math.cos(angle), math.sin(angle)), 0, cfg)
            lo = math.log(radius) / 2
            up = 2 * radius * math.log(radius)
            if abs(b.lower - lo) > 1e-9 * lo or abs(b.upper - up) > 1e-9 * up:
                bad_closed += 1
            if not (b.lower <= radius - 1 <= b.upper):
                bad_bracket += 1
    passed = bad_closed == 0 and bad_bracket == 0 and clock.seconds < 1
    acceptance(3, "unit-disk DE exactness", passed,
               f"{bad_closed} closed-form misses, {bad_bracket} bracket misses of 100", clock.seconds)
    assert passed


def _bracket_fraction(p, grid, rng, window):
    cfg = IterConfig(p, 4096)
    x0, y0, x1, y1 = window
    chosen = []
    while len(chosen) < 200:
        q = rng.uniform((x0 - 0.6, y0 - 0.6), (x1 + 0.6, y1 + 0.6), size=(2000, 2))
        d = grid_distances(q, grid)
        keep = (d >= 0.05) & (d <= 1.0)
        chosen.extend(zip(q[keep], d[keep]))
    good = 0
    for (x, y), d in chosen[:200]:
        b = multibrot_distance_bounds(complex(x, y), cfg)
        good += (not b.interior) and b.lower <= 1.05 * d and d <= 1.05 * b.upper
    return good / 200


def test_c4_oracle_bracketing(acceptance, grids, m2_grid, m3_grid):
    rng = np.random.default_rng(104)
    with Clock() as clock:
        f2 = _bracket_fraction(2, m2_grid, rng, M2_WINDOW)
        f3 = _bracket_fraction(3, m3_grid, rng, M3_WINDOW)
    seconds = clock.seconds + grids.build_seconds.get("m2", 0) + grids.build_seconds.get("m3", 0)
    passed = f2 >= 0.98 and f3 >= 0.98 and seconds < 300
    acceptance(4, "oracle bracketing", passed, f"p=2 {f2:.1%}, p=3 {f3:.1%}", seconds)
    assert passed


def test_c5_multibrot_landmark(acceptance, m2_grid):
    with Clock() as clock:
        b = multibrot_distance_bounds(1.0, IterConfig(2, 4096))
        oracle = grid_distance((1.0, 0.0), m2_grid)
    # the oracle puts the nearest members at 0.607, not 0.75; the bounds bracket both
    passed = b.lower <= 0.74 and 0.76 <= b.upper and b.lower <= oracle <= b.upper and clock.seconds < 1
    acceptance(5, "Multibrot landmark at c0 = 1", passed,
               f"[{b.lower:.4f}, {b.upper:.4f}] brackets 0.75 +/- 0.01; oracle distance {oracle:.4f}",
               clock.seconds)
    assert passed


def test_c6_tetrabrot_identity(acceptance, m2_grid):
    rng = np.random.default_rng(106)
    cfg = IterConfig(2, 4096)
    with Clock() as clock:
        pts = rng.uniform(-2, 2, size=(10_000, 3))
        x, y, z = pts.T
        band = np.minimum(boundary_distances(np.c_[x, y - z], m2_grid),
                          boundary_distances(np.c_[x, y + z], m2_grid)) <= 1e-3
        direct = slice_oracle_members(pts, TETRABROT, 2, 4096)
        via = np.array([tetrabrot_characterization(v, 2, cfg) for v in pts])
        mismatches = int(((direct != via) & ~band).sum())
    passed = mismatches == 0 and clock.seconds < 60
    acceptance(6, "Tetrabrot identity", passed,
               f"{mismatches} mismatches on {int((~band).sum())} points outside the band "
               f"({int(direct.sum())} members)", clock.seconds)
    assert passed


def _octahedron_mismatch(p, pitch=1e-2):
    lo, hi = real_multibrot_interval(p)
    a, r = (lo + hi) / 2, (hi - lo) / 2
    m = r + 0.05
    grid = slice_grid(AIRBROT, p, (a - m, -m, -m, a + m, m, m), pitch=pitch, mirror=(1, 2))
    xs, ys, zs = grid.axes()
    l1 = (np.abs(xs - a)[:, None, None] + np.abs(ys)[None, :, None] + np.abs(zs)[None, None, :])
    # lattice samples land exactly on the faces, so allow for rounding in |x-a|+|y|+|z|
    ball = l1 <= r * (1 + 1e-12)
    return int((grid.mask ^ ball).sum()), int((grid.mask | ball).sum())


def test_c7_airbrot_octahedron(acceptance):
    with Clock() as clock:
        counts = {p: _octahedron_mismatch(p) for p in (2, 3)}
    frac = {p: diff / union for p, (diff, union) in counts.items()}
    passed = all(f < 0.01 for f in frac.values()) and clock.seconds < 300
    detail = ", ".join(f"p={p} {d}/{u} samples ({frac[p]:.3%})" for p, (d, u) in counts.items())
    acceptance(7, "Airbrot octahedron", passed, f"symmetric difference / union: {detail}", clock.seconds)
    assert passed


C8_CAMERA = Camera(width=128, height=128)
C8_PARAMS = RenderParams(epsilon=1e-3)


def test_c8_render_soundness(acceptance):
    scene = SliceScene(TETRABROT)
    eps = C8_PARAMS.epsilon
    with Clock() as clock:
        buf = trace_frame(scene, C8_CAMERA, C8_PARAMS)
        hits = buf.points[buf.hit]
        d = local_member_distance(hits, TETRABROT, 2, radius=5 * eps, pitch=eps)
        near = float(np.mean(d <= 5 * eps))
        _, upper, inside, _, _ = slice_distance_field(hits, scene)
        certified = float(np.mean(inside | (upper <= 5 * eps)))
    passed = near >= 0.99 and clock.seconds < 120
    acceptance(8, "render soundness (hits near oracle set)", passed,
               f"{near:.1%} of {len(hits)} hits within 5 eps of a lattice member; "
               f"{certified:.1%} have DE upper bound <= 5 eps", clock.seconds)
    assert passed


def test_c8_render_determinism(acceptance):
    scene = SliceScene(TETRABROT)
    workers = max(4, os.cpu_count() or 1)
    with Clock() as clock:
        first = render(scene, C8_CAMERA, C8_PARAMS).to_bytes()
        second = render(scene, C8_CAMERA, C8_PARAMS).to_bytes()
        threaded = render(scene, C8_CAMERA, RenderParams(epsilon=1e-3, workers=workers)).to_bytes()
    passed = first == second == threaded and clock.seconds < 120
    acceptance(8, "render determinism", passed,
               f"two runs and 1 vs {workers} workers {'identical' if passed else 'differ'}", clock.seconds)
    assert passed


def test_c9_figures(acceptance, grids, m3_grid):
    c = complex(-1, 0.2)
    k2_window = (-1.8, -1.0, 1.8, 1.0)
    with Clock() as clock:
        m3 = render_complex_figure(FigureKind.multibrot(3), M3_WINDOW, (500, 500))
        k2_grid = grids.get("k2", lambda: julia_grid(2, c, k2_window))
        k2 = render_complex_figure(FigureKind.julia(2, c), k2_window, (720, 400))
        pairs = {
            "M3": (float((m3.pixels == 0).mean()), float(m3_grid.mask.mean())),
            "K2": (float((k2.pixels == 0).mean()), float(k2_grid.mask.mean())),
        }
    rel = {k: abs(img - ref) / ref for k, (img, ref) in pairs.items()}
    passed = all(v <= 0.2 for v in rel.values()) and clock.seconds < 60
    detail = ", ".join(f"{k} image {img:.4f} vs oracle {ref:.4f} ({rel[k]:.1%})" for k, (img, ref) in pairs.items())
    acceptance(9, "2D figures", passed, detail, clock.seconds)
    assert passed
