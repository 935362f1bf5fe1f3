"""Command line: ``render``, ``probe`` and ``figure``.

Exit status is 0 on success, 2 for configuration errors and 3 for failures
while computing or writing output.
"""
from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path
from typing import Sequence

from .algebra import decompose
from .config import ConfigError, FigureConfig, RunConfig, parse_config
from .distance import bounds_from_orbit, combine
from .dynamics import IterConfig, orbit_julia, orbit_multibrot
from .render import FigureKind, render_complex_figure, shade, trace_frame
from .slices import embed

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
NEGATIVE = re.compile(r"^-[\d.]")


def _fmt_bool(flag: bool) -> str:
    return "true" if flag else "false"


def _fmt_complex(z: complex) -> str:
    return f"{z.real!r},{z.imag!r}"


def probe(point: Sequence[float], config: RunConfig) -> list[tuple[str, str]]:
    """Every intermediate of the slice distance estimate for one point, as key/value pairs."""
    scene = config.scene
    cfg = scene.cfg
    eta = embed(point, scene.basis)
    comps = decompose(eta)
    constants = scene.component_constants
    out = [
        ("point", ",".join(repr(float(v)) for v in point)),
        ("basis", str(scene.basis)),
        ("mode", scene.mode.value),
        ("p", str(cfg.p)),
        ("max_iter", str(cfg.max_iter)),
        ("embedding", ",".join(repr(v) for v in eta.coeffs)),
    ]
    parts = []
    for name, g, c in zip(comps._fields, comps, constants):
        key = f"component.{name}"
        out.append((key, _fmt_complex(g)))
        if scene.is_multibrot:
            orbit = orbit_multibrot(g, cfg)
            bounds = bounds_from_orbit(orbit, orbit.m - 1)
        else:
            out.append((f"{key}.c", _fmt_complex(complex(c))))
            orbit = orbit_julia(g, complex(c), cfg)
            bounds = bounds_from_orbit(orbit, orbit.m)
        parts.append(bounds)
        out += [
            (f"{key}.escaped", _fmt_bool(orbit.escaped)),
            (f"{key}.iterations", str(orbit.m)),
            (f"{key}.log_abs_z", repr(orbit.log_magnitude)),
            (f"{key}.log_abs_dz", repr(orbit.log_dz)),
            (f"{key}.smooth_count", repr(orbit.smooth_count)),
            (f"{key}.lower", repr(bounds.lower)),
            (f"{key}.upper", repr(bounds.upper)),
            (f"{key}.interior", _fmt_bool(bounds.interior)),
            (f"{key}.degenerate", _fmt_bool(bounds.degenerate)),
        ]
    total = combine(parts)
    out += [
        ("aggregate.lower", repr(total.lower)),
        ("aggregate.upper", repr(total.upper)),
        ("aggregate.interior", _fmt_bool(total.interior)),
        ("aggregate.degenerate", _fmt_bool(total.degenerate)),
    ]
    return out


def _parse_sets(items: Sequence[str]) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError([f"--set expects key=value, got {item!r}"])
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _floats(text: str, n: int, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != n:
        raise ConfigError([f"{what} needs {n} comma-separated numbers, got {text!r}"])
    return vals


def _load(path: str | None, overrides: dict[str, str]) -> RunConfig:
    text = ""
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError([f"cannot read config {path}: {exc}"]) from exc
    return parse_config(text, overrides)


def cmd_render(args) -> int:
    overrides = _parse_sets(args.set)
    if args.output:
        overrides["output"] = args.output
    config = _load(args.config, overrides)
    buf = trace_frame(config.scene, config.camera, config.render)
    image = shade(buf, config.camera, config.render)
    image.save(config.output)
    hits = int(buf.hit.sum())
    print(f"output={config.output}")
    print(f"width={image.width}")
    print(f"height={image.height}")
    print(f"hits={hits}")
    print(f"hit_fraction={hits / buf.hit.size!r}")
    print(f"mean_steps={float(buf.steps.mean())!r}")
    if args.plot:
        from .plotting import plot_render

        plot_render(image, args.plot, buf.steps)
        print(f"plot={args.plot}")
    return EXIT_OK


def cmd_probe(args) -> int:
    config = _load(args.config, _parse_sets(args.set))
    point = _floats(args.point, 3, "--point")
    pairs = probe(point, config)
    for key, value in pairs:
        print(f"{key}={value}")
    if args.plot:
        from .plotting import plot_component_orbits

        comps = decompose(embed(point, config.scene.basis))
        plot_component_orbits(comps, config.scene.component_constants, config.scene.p,
                              config.scene.is_multibrot, config.scene.cfg.max_iter, args.plot,
                              title=f"orbits of the components of {args.point}")
        print(f"plot={args.plot}")
    return EXIT_OK


def cmd_figure(args) -> int:
    c = complex(*_floats(args.c, 2, "--c")) if args.c else None
    window = _floats(args.window, 4, "--window") if args.window else None
    try:
        fig = FigureConfig(args.kind, args.p, c, window, args.width, args.height, args.max_iter)
        kind = fig.figure_kind
        IterConfig(args.p, args.max_iter)
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc
    window = fig.resolved_window
    if not (window[2] > window[0] and window[3] > window[1]):
        raise ConfigError([f"window {window} must satisfy x0 < x1 and y0 < y1"])
    image = render_complex_figure(kind, window, (fig.width, fig.height), fig.max_iter)
    image.save(args.output)
    interior = float((image.pixels == 0).mean())
    print(f"output={args.output}")
    print(f"kind={kind.name}")
    print(f"p={kind.p}")
    print(f"window={','.join(repr(float(v)) for v in window)}")
    print(f"interior_fraction={interior!r}")
    if args.png:
        from .plotting import plot_figure

        title = f"M^{kind.p}" if kind.c is None else f"K^{kind.p}, c = {kind.c:.4g}"
        plot_figure(image, window, args.png, title)
        print(f"png={args.png}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tricomplex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="ray-march a 3D slice to a PPM image")
    p.add_argument("--config")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--output")
    p.add_argument("--plot", help="also write a PNG report (image and step counts)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("probe", help="distance-estimate pipeline for one slice point")
    p.add_argument("--config")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--point", required=True, metavar="X,Y,Z")
    p.add_argument("--plot", help="also write a PNG of the component orbits")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("figure", help="2D Multibrot or Julia picture as a PGM image")
    p.add_argument("--kind", choices=("multibrot", "julia"), required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--c", help="Julia constant re,im")
    p.add_argument("--window", metavar="X0,Y0,X1,Y1")
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--max-iter", type=int, default=256, dest="max_iter")
    p.add_argument("--output", required=True)
    p.add_argument("--png", help="also write a PNG with labelled axes")
    p.set_defaults(func=cmd_figure)
    return parser


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--c -1,0.2`` into ``--c=-1,0.2`` so argparse does not read a flag."""
    out: list[str] = []
    for token in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and NEGATIVE.match(token):
            out[-1] = f"{out[-1]}={token}"
        else:
            out.append(token)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        return args.func(args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
