"""Matplotlib report figures written next to the key=value / PNM output."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .pnm import Image  # noqa: E402

COMPONENT_LABELS = ("g11", "g21", "g12", "g22")


def orbit_log_moduli(z0: complex, c: complex, p: int, steps: int, critical: bool,
                     radius: float = 1e8) -> list[float]:
    """ln|z_k| along an orbit until it leaves the disc of the given radius."""
    z = c if critical else z0
    out = []
    for _ in range(steps):
        a = abs(z)
        out.append(math.log(a) if a > 0 else -math.inf)
        if a > radius:
            break
        z = z**p + c
    return out


def plot_component_orbits(components: Sequence[complex], constants: Sequence[complex], p: int,
                          critical: bool, steps: int, path: str | Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    styles = ("-", "--", ":", "-.")
    for label, g, c, ls in zip(COMPONENT_LABELS, components, constants, styles):
        logs = orbit_log_moduli(g, g if critical else c, p, steps, critical)
        ax.plot(range(len(logs)), logs, ls=ls, marker=".", ms=3, lw=1.2, label=f"{label} = {g:.4g}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("ln |z_k|")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="small")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_figure(image: Image, window: Sequence[float], path: str | Path, title: str = "") -> Path:
    """The complex-plane raster with labelled axes."""
    x0, y0, x1, y1 = window
    fig, ax = plt.subplots(figsize=(6.0, 6.0 * (y1 - y0) / (x1 - x0) + 0.6))
    cmap = "gray" if image.grayscale else None
    ax.imshow(image.pixels, extent=(x0, x1, y0, y1), cmap=cmap, vmin=0, vmax=255,
              interpolation="nearest")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_render(image: Image, path: str | Path, hit_steps: np.ndarray | None = None) -> Path:
    """The shaded frame, optionally beside a heat map of marching steps."""
    ncols = 1 if hit_steps is None else 2
    fig, axes = plt.subplots(1, ncols, figsize=(5.0 * ncols, 5.0), squeeze=False)
    axes[0, 0].imshow(image.pixels, interpolation="nearest")
    axes[0, 0].set_axis_off()
    if hit_steps is not None:
        im = axes[0, 1].imshow(hit_steps, cmap="magma", interpolation="nearest")
        axes[0, 1].set_title("marching steps")
        axes[0, 1].set_axis_off()
        fig.colorbar(im, ax=axes[0, 1], fraction=0.046)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
