"""Flat ``section.key = value`` run configuration.

Lines are ``key = value``; blank lines and ``#`` comments are ignored.
Every problem in a file is collected and reported together.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

from .algebra import Tricomplex
from .dynamics import IterConfig
from .render import Camera, FigureKind, RenderParams, default_window
from .slices import Mode, SliceBasis, SliceScene


class RunMode(str, Enum):
    RENDER3D = "render3d"
    RENDER2D = "render2d"
    PROBE = "probe"


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class FigureConfig:
    kind: str = "multibrot"
    p: int = 2
    c: complex | None = None
    window: tuple[float, float, float, float] | None = None
    width: int = 512
    height: int = 512
    max_iter: int = 256

    @property
    def figure_kind(self) -> FigureKind:
        return FigureKind(self.kind, self.p, self.c)

    @property
    def resolved_window(self) -> tuple[float, float, float, float]:
        return self.window if self.window is not None else default_window(self.figure_kind)


@dataclass(frozen=True)
class RunConfig:
    scene: SliceScene = field(default_factory=SliceScene)
    camera: Camera = field(default_factory=Camera)
    render: RenderParams = field(default_factory=RenderParams)
    figure: FigureConfig = field(default_factory=FigureConfig)
    mode: RunMode = RunMode.RENDER3D
    output: str = "out.ppm"


def _floats(text: str, n: int | None = None) -> tuple[float, ...]:
    vals = tuple(float(t) for t in text.split(","))
    if n is not None and len(vals) != n:
        raise ValueError(f"expected {n} comma-separated numbers, got {len(vals)}")
    if any(math.isnan(v) for v in vals):
        raise ValueError("NaN is not allowed")
    return vals


def _int(text: str) -> int:
    return int(text)


def _optional(parse: Callable[[str], Any]) -> Callable[[str], Any]:
    return lambda text: None if text.strip() == "auto" else parse(text)


def _complex(text: str) -> complex:
    re, im = _floats(text, 2)
    return complex(re, im)


def _fmt(value: Any) -> str:
    if value is None:
        return "auto"
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, complex):
        return f"{value.real!r},{value.imag!r}"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    if isinstance(value, Tricomplex):
        return _fmt(value.coeffs)
    return str(value)


# key -> (parser, default)
_KEYS: dict[str, tuple[Callable[[str], Any], Any]] = {
    "mode": (RunMode, RunMode.RENDER3D),
    "output": (str, "out.ppm"),
    "scene.basis": (SliceBasis.parse, SliceScene().basis),
    "scene.p": (_int, 2),
    "scene.mode": (Mode, Mode.MULTIBROT),
    "scene.julia_c": (_optional(lambda t: Tricomplex(_floats(t, 8))), None),
    "scene.max_iter": (_int, 256),
    "scene.escape_radius": (float, 1e8),
    "camera.position": (lambda t: _floats(t, 3), Camera().position),
    "camera.look_at": (lambda t: _floats(t, 3), Camera().look_at),
    "camera.up": (lambda t: _floats(t, 3), Camera().up),
    "camera.vfov": (float, Camera().vfov_degrees),
    "camera.width": (_int, Camera().width),
    "camera.height": (_int, Camera().height),
    "render.epsilon": (_optional(float), None),
    "render.max_steps": (_int, 512),
    "render.safety_factor": (float, 0.5),
    "render.t_max": (float, math.inf),
    "render.normal_h": (_optional(float), None),
    "render.light_dir": (_optional(lambda t: _floats(t, 3)), None),
    "render.background": (lambda t: tuple(int(v) for v in t.split(",")), RenderParams().background),
    "render.workers": (_int, 1),
    "figure.kind": (str, "multibrot"),
    "figure.p": (_int, 2),
    "figure.c": (_optional(_complex), None),
    "figure.window": (_optional(lambda t: _floats(t, 4)), None),
    "figure.width": (_int, 512),
    "figure.height": (_int, 512),
    "figure.max_iter": (_int, 256),
}

KEYS = tuple(_KEYS)


def _split_lines(text: str, errors: list[str]) -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            errors.append(f"line {lineno}: unknown key {key!r}")
        elif key in raw:
            errors.append(f"line {lineno}: key {key!r} given twice")
        else:
            raw[key] = value
    return raw


def _build(values: dict[str, Any], errors: list[str]) -> RunConfig | None:
    def attempt(label: str, make: Callable[[], Any]):
        try:
            return make()
        except (ValueError, TypeError) as exc:
            errors.append(f"{label}: {exc}")
            return None

    v = values
    cfg = attempt("scene", lambda: IterConfig(v["scene.p"], v["scene.max_iter"], v["scene.escape_radius"]))
    scene = None
    if cfg is not None and v["scene.basis"] is not None:
        scene = attempt("scene", lambda: SliceScene(v["scene.basis"], v["scene.mode"], cfg, v["scene.julia_c"]))
    camera = attempt("camera", lambda: Camera(
        v["camera.position"], v["camera.look_at"], v["camera.up"], v["camera.vfov"],
        v["camera.width"], v["camera.height"],
    ))
    render = attempt("render", lambda: RenderParams(
        v["render.epsilon"], v["render.max_steps"], v["render.safety_factor"], v["render.t_max"],
        v["render.normal_h"], v["render.light_dir"], v["render.background"], v["render.workers"],
    ))
    figure = attempt("figure", lambda: _figure(v))
    if errors:
        return None
    return RunConfig(scene, camera, render, figure, v["mode"], v["output"])


def _figure(v: dict[str, Any]) -> FigureConfig:
    fig = FigureConfig(v["figure.kind"], v["figure.p"], v["figure.c"], v["figure.window"],
                       v["figure.width"], v["figure.height"], v["figure.max_iter"])
    fig.figure_kind  # validates kind, p and c
    if fig.window is not None and not (fig.window[2] > fig.window[0] and fig.window[3] > fig.window[1]):
        raise ValueError(f"window {fig.window} must satisfy x0 < x1 and y0 < y1")
    if fig.width < 1 or fig.height < 1 or fig.max_iter < 1:
        raise ValueError("figure size and max_iter must be positive")
    return fig


def parse_config(text: str, overrides: dict[str, str] | None = None) -> RunConfig:
    """Parse a config; ``overrides`` (e.g. from the command line) replace file keys.

    Raises :class:`ConfigError` listing every problem found.
    """
    errors: list[str] = []
    raw = _split_lines(text, errors)
    for key, value in (overrides or {}).items():
        if key not in _KEYS:
            errors.append(f"override: unknown key {key!r}")
        else:
            raw[key] = value
    values: dict[str, Any] = {}
    for key, (parse, default) in _KEYS.items():
        if key not in raw:
            values[key] = default
            continue
        try:
            values[key] = parse(raw[key])
        except (ValueError, TypeError) as exc:
            errors.append(f"{key}: {exc}")
            values[key] = None if key == "scene.basis" else default
    config = _build(values, errors)
    if errors:
        raise ConfigError(errors)
    return config


def to_items(config: RunConfig) -> dict[str, Any]:
    s, cam, r, f = config.scene, config.camera, config.render, config.figure
    return {
        "mode": config.mode,
        "output": config.output,
        "scene.basis": s.basis,
        "scene.p": s.cfg.p,
        "scene.mode": s.mode,
        "scene.julia_c": s.julia_c,
        "scene.max_iter": s.cfg.max_iter,
        "scene.escape_radius": float(s.cfg.escape_radius),
        "camera.position": cam.position,
        "camera.look_at": cam.look_at,
        "camera.up": cam.up,
        "camera.vfov": float(cam.vfov_degrees),
        "camera.width": cam.width,
        "camera.height": cam.height,
        "render.epsilon": r.epsilon,
        "render.max_steps": r.max_steps,
        "render.safety_factor": float(r.safety_factor),
        "render.t_max": float(r.t_max),
        "render.normal_h": r.normal_h,
        "render.light_dir": r.light_dir,
        "render.background": tuple(r.background),
        "render.workers": r.workers,
        "figure.kind": f.kind,
        "figure.p": f.p,
        "figure.c": f.c,
        "figure.window": f.window,
        "figure.width": f.width,
        "figure.height": f.height,
        "figure.max_iter": f.max_iter,
    }


def serialize(config: RunConfig) -> str:
    return "".join(f"{key} = {_fmt(value)}\n" for key, value in to_items(config).items())
