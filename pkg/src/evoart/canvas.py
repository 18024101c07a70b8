"""RGB raster canvas, built-in palettes and clipped drawing primitives."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

RGB = tuple[int, int, int]
BLACK: RGB = (0, 0, 0)


@dataclass(frozen=True)
class Palette:
    id: int
    colors: tuple[RGB, ...]
    background: RGB = BLACK


def _hex(*codes: str) -> tuple[RGB, ...]:
    return tuple(tuple(int(c[i:i + 2], 16) for i in (0, 2, 4)) for c in codes)


PALETTES: tuple[Palette, ...] = (
    Palette(0, _hex("ff0054", "ffbd00", "390099", "9e0059")),
    Palette(1, _hex("00f5d4", "00bbf9", "fee440", "f15bb5")),
    Palette(2, _hex("e63946", "f1faee", "a8dadc", "457b9d")),
    Palette(3, _hex("ffffff", "888888")),
    Palette(4, _hex("ff6d00", "ff9e00", "240046", "7b2cbf", "e0aaff")),
    Palette(5, _hex("2d6a4f", "52b788", "b7e4c7", "d8f3dc")),
    Palette(6, _hex("ff0000", "00ff00", "0000ff")),
    Palette(7, _hex("ffcdb2", "ffb4a2", "e5989b", "b5838d", "6d6875")),
)


def palette(pid: int) -> Palette:
    return PALETTES[int(pid) % len(PALETTES)]


class Canvas:
    """Fixed-size 8-bit RGB raster; ``pixels`` has shape (height, width, 3)."""

    def __init__(self, width: int, height: int, background: RGB = BLACK):
        if width < 1 or height < 1:
            raise ValueError(f"canvas must be non-empty, got {width}x{height}")
        self.width = int(width)
        self.height = int(height)
        self.background = tuple(int(c) for c in background)
        self.pixels = np.empty((self.height, self.width, 3), dtype=np.uint8)
        self.pixels[:] = self.background

    @classmethod
    def from_array(cls, pixels: np.ndarray, background: RGB = BLACK) -> Canvas:
        h, w = pixels.shape[:2]
        c = cls(w, h, background)
        c.pixels[:] = pixels
        return c

    @property
    def size(self) -> tuple[int, int]:
        return self.width, self.height

    def copy(self) -> Canvas:
        return Canvas.from_array(self.pixels, self.background)

    def __eq__(self, other):
        if not isinstance(other, Canvas):
            return NotImplemented
        return self.background == other.background and np.array_equal(self.pixels, other.pixels)

    def plot(self, xs, ys, colors) -> None:
        """Set pixels at rounded (x, y) positions; positions off the canvas are dropped.

        ``colors`` is a single RGB triple or one row per point.
        """
        xs = np.rint(np.asarray(xs, dtype=float)).astype(np.int64)
        ys = np.rint(np.asarray(ys, dtype=float)).astype(np.int64)
        inside = (xs >= 0) & (xs < self.width) & (ys >= 0) & (ys < self.height)
        colors = np.asarray(colors, dtype=np.uint8)
        if colors.ndim == 2:
            colors = colors[inside]
        self.pixels[ys[inside], xs[inside]] = colors

    def stamp(self, xs, ys, colors, thickness: int) -> None:
        """Plot each point as a ``thickness`` x ``thickness`` square."""
        thickness = max(1, int(thickness))
        lo = -(thickness // 2)
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        colors = np.asarray(colors, dtype=np.uint8)
        for dy in range(lo, lo + thickness):
            for dx in range(lo, lo + thickness):
                self.plot(xs + dx, ys + dy, colors)

    def polyline(self, xs, ys, color, thickness: int = 1) -> None:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.size == 0:
            return
        if xs.size == 1:
            self.stamp(xs, ys, color, thickness)
            return
        px, py = densify(xs, ys)
        self.stamp(px, py, color, thickness)

    def fill_circle(self, cx: float, cy: float, r: float, color) -> None:
        x0, x1 = max(0, int(np.floor(cx - r))), min(self.width - 1, int(np.ceil(cx + r)))
        y0, y1 = max(0, int(np.floor(cy - r))), min(self.height - 1, int(np.ceil(cy + r)))
        if x0 > x1 or y0 > y1:
            return
        yy, xx = np.mgrid[y0:y1 + 1, x0:x1 + 1]
        mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        self.pixels[y0:y1 + 1, x0:x1 + 1][mask] = color

    def to_image(self) -> Image.Image:
        return Image.fromarray(self.pixels)

    def save(self, path) -> None:
        self.to_image().save(Path(path), format="PNG")


def densify(xs: np.ndarray, ys: np.ndarray, step: float = 0.5):
    """Sample points along consecutive segments at most ``step`` pixels apart."""
    dx, dy = np.diff(xs), np.diff(ys)
    n = np.maximum(1, np.ceil(np.hypot(dx, dy) / step).astype(np.int64))
    seg = np.repeat(np.arange(dx.size), n)
    starts = np.cumsum(n) - n
    t = (np.arange(n.sum()) - np.repeat(starts, n)) / np.repeat(n, n)
    px = xs[seg] + dx[seg] * t
    py = ys[seg] + dy[seg] * t
    return np.append(px, xs[-1]), np.append(py, ys[-1])


def load_image(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def load_canvas(path, background: RGB = BLACK) -> Canvas:
    return Canvas.from_array(load_image(path), background)
