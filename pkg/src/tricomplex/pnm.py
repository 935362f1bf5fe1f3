"""Binary PPM (P6) / PGM (P5) images."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class Image:
    """8-bit raster, row-major with the origin at the top-left.

    ``pixels`` has shape (height, width, 3) for RGB or (height, width) for
    grayscale.
    """

    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim not in (2, 3) or (self.pixels.ndim == 3 and self.pixels.shape[2] != 3):
            raise ValueError(f"unsupported pixel array shape {self.pixels.shape}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def grayscale(self) -> bool:
        return self.pixels.ndim == 2

    def rows(self):
        return [list(map(tuple, row)) if not self.grayscale else list(row) for row in self.pixels]

    def to_bytes(self) -> bytes:
        magic = b"P5" if self.grayscale else b"P6"
        header = magic + b"\n%d %d\n255\n" % (self.width, self.height)
        return header + self.pixels.tobytes()

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_bytes(self.to_bytes())
        return path


def read_pnm(path: str | Path) -> Image:
    data = Path(path).read_bytes()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    if magic not in (b"P5", b"P6") or maxval != b"255":
        raise ValueError(f"{path}: not an 8-bit binary PPM/PGM file")
    width, height = map(int, dims.split())
    shape = (height, width) if magic == b"P5" else (height, width, 3)
    return Image(np.frombuffer(rest, dtype=np.uint8).reshape(shape))
