"""Seeded fractal gradient (Perlin) noise over the plane."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# corner gradients of length sqrt(2); keeps single-octave output inside [-1, 1]
_GRADIENTS = np.array([(1, 1), (-1, 1), (1, -1), (-1, -1),
                       (1, 0), (-1, 0), (0, 1), (0, -1)], dtype=float)
_GRADIENTS[4:] *= math.sqrt(2.0)
_GX = _GRADIENTS[:, 0].copy()
_GY = _GRADIENTS[:, 1].copy()


def _fade(t):
    return t * t * t * (t * (t * 6 - 15) + 10)


@dataclass(frozen=True)
class NoiseField:
    seed: int = 0
    octaves: int = 1
    falloff: float = 0.5
    scale: float = 0.01
    _perm: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.octaves < 1:
            raise ValueError("octaves must be >= 1")
        if not 0 < self.falloff <= 1:
            raise ValueError("falloff must lie in (0, 1]")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        perm = np.random.default_rng(self.seed).permutation(256)
        object.__setattr__(self, "_perm", np.concatenate([perm, perm]))

    def _layer(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        xf, yf = np.floor(x), np.floor(y)
        xi = xf.astype(np.int64) & 255
        yi = yf.astype(np.int64) & 255
        x -= xf
        y -= yf
        u, v = _fade(x), _fade(y)
        p = self._perm

        def grad(ix, iy, dx, dy):
            h = p[p[ix] + iy] & 7
            return _GX[h] * dx + _GY[h] * dy

        n00 = grad(xi, yi, x, y)
        n10 = grad(xi + 1, yi, x - 1, y)
        n01 = grad(xi, yi + 1, x, y - 1)
        n11 = grad(xi + 1, yi + 1, x - 1, y - 1)
        nx0 = n00 + u * (n10 - n00)
        nx1 = n01 + u * (n11 - n01)
        return nx0 + v * (nx1 - nx0)

    def value(self, x, y):
        """Noise at canvas coordinates; scalar in, float out, arrays in, array out."""
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        x = np.asarray(x, dtype=float) * self.scale
        y = np.asarray(y, dtype=float) * self.scale
        total = np.zeros(np.broadcast(x, y).shape)
        amp, freq, norm = 1.0, 1.0, 0.0
        for _ in range(self.octaves):
            total += amp * self._layer(x * freq, y * freq)
            norm += amp
            amp *= self.falloff
            freq *= 2.0
        out = np.clip(total / norm, -1.0, 1.0)
        return float(out) if scalar else out


def noise_value(field: NoiseField, x, y):
    return field.value(x, y)


def angle_from_noise(n):
    return n * (2.0 * math.pi)


def angle_at(field: NoiseField, x, y):
    return angle_from_noise(field.value(x, y))
