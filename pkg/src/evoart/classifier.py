"""Nearest-centroid "art" / "not art" scoring on hand-crafted image features.

The extractor maps an image to a fixed 58-value vector.  Training
standardises every dimension by its pooled standard deviation and keeps
the mean vector of each class; an image is scored by its relative
distance to the two means::

    score = d_art / (d_art + d_notart)

so 0 means "on the art centroid", 1 means "on the not-art centroid" and
0.5 is the decision boundary.
"""

from __future__ import annotations

import csv
import functools
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .canvas import BLACK, Canvas, load_image

EXTRACTOR_ID = "handcrafted-v1"
DIMENSION = 58
SPECTRUM_SIZE = 128
SPECTRUM_BANDS = 16
EDGE_THRESHOLD = 100.0
GRADIENT_BINS = np.array([0, 4, 8, 16, 32, 64, 128, 256, np.inf])
NEAR_BACKGROUND = 8
IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".gif", ".tif", ".tiff", ".webp"}


class ClassifierError(RuntimeError):
    pass


class ModelIncompatibleError(ClassifierError):
    pass


def _as_array(image) -> tuple[np.ndarray, tuple]:
    if isinstance(image, Canvas):
        return image.pixels.astype(float), image.background
    arr = np.asarray(image, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {arr.shape}")
    return arr, BLACK


def grayscale(rgb: np.ndarray) -> np.ndarray:
    return rgb @ np.array([0.299, 0.587, 0.114])


def laplacian_variance(gray: np.ndarray) -> float:
    # periodic boundary: a box blur then provably never raises this value
    return float(ndimage.laplace(gray, mode="wrap").var())


def gradient_magnitude(gray: np.ndarray) -> np.ndarray:
    gx = ndimage.sobel(gray, axis=1, mode="nearest")
    gy = ndimage.sobel(gray, axis=0, mode="nearest")
    return np.hypot(gx, gy)


def _downsample(gray: np.ndarray, size: int = SPECTRUM_SIZE) -> np.ndarray:
    h, w = gray.shape
    if (h, w) == (size, size):
        return gray
    rows = (np.arange(size) * h) // size
    cols = (np.arange(size) * w) // size
    return gray[np.ix_(rows, cols)]


def band_edges(size: int = SPECTRUM_SIZE, bands: int = SPECTRUM_BANDS) -> np.ndarray:
    return np.geomspace(1.0 / size, np.sqrt(0.5) + 1e-9, bands + 1)


def radial_power_spectrum(gray: np.ndarray, bands: int = SPECTRUM_BANDS) -> np.ndarray:
    """log10(1 + mean power) in log-spaced radial frequency bands."""
    g = _downsample(gray)
    power = np.abs(np.fft.fft2(g - g.mean())) ** 2 / g.size
    fy = np.fft.fftfreq(g.shape[0])[:, None]
    fx = np.fft.fftfreq(g.shape[1])[None, :]
    radius = np.hypot(fx, fy).ravel()
    edges = band_edges(g.shape[0], bands)
    idx = np.digitize(radius, edges) - 1
    valid = (idx >= 0) & (idx < bands)
    sums = np.bincount(idx[valid], weights=power.ravel()[valid], minlength=bands)
    counts = np.bincount(idx[valid], minlength=bands)
    means = np.divide(sums, counts, out=np.zeros(bands), where=counts > 0)
    return np.log10(1.0 + means)


def extract_features(image) -> np.ndarray:
    """58 features: colour histograms and moments, gradient statistics,
    blur (Laplacian variance), entropy, radial power spectrum, edge density
    and near-background share.  Accepts a Canvas or an (H, W, 3) array.
    """
    rgb, background = _as_array(image)
    if rgb.size == 0:
        raise ValueError("empty image")
    n = rgb.shape[0] * rgb.shape[1]
    flat = rgb.reshape(-1, 3)
    hist = [np.histogram(flat[:, c], bins=8, range=(0, 256))[0] / n for c in range(3)]
    moments = np.concatenate([flat.mean(axis=0), flat.var(axis=0)])
    gray = grayscale(rgb)
    mag = gradient_magnitude(gray)
    grad_hist = np.histogram(mag, bins=GRADIENT_BINS)[0] / n
    counts = np.bincount(np.clip(np.rint(gray), 0, 255).astype(np.int64).ravel(), minlength=256)
    p = counts[counts > 0] / n
    entropy = float(-(p * np.log2(p)).sum())
    near_bg = (np.abs(rgb - np.array(background, dtype=float)) <= NEAR_BACKGROUND).all(axis=2).mean()
    vec = np.concatenate([
        *hist, moments, grad_hist,
        [laplacian_variance(gray), entropy],
        radial_power_spectrum(gray),
        [(mag > EDGE_THRESHOLD).mean(), near_bg],
    ])
    assert vec.size == DIMENSION
    return vec


@dataclass(frozen=True)
class CentroidModel:
    extractor_id: str
    dimension: int
    scale: np.ndarray
    art_centroid: np.ndarray
    notart_centroid: np.ndarray

    def __post_init__(self):
        for name in ("scale", "art_centroid", "notart_centroid"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (self.dimension,) or not np.isfinite(v).all():
                raise ClassifierError(f"{name} must be {self.dimension} finite values")
            object.__setattr__(self, name, v)
        if (self.scale <= 0).any():
            raise ClassifierError("scale values must be positive")

    def save(self, path) -> None:
        def row(v):
            return " ".join(f"{x:.17e}" for x in v)
        Path(path).write_text(
            f"extractor_id {self.extractor_id}\n"
            f"dimension {self.dimension}\n"
            f"{row(self.scale)}\n{row(self.art_centroid)}\n{row(self.notart_centroid)}\n")

    @classmethod
    def load(cls, path) -> CentroidModel:
        lines = Path(path).read_text().split("\n")
        try:
            key1, ext_id = lines[0].split(None, 1)
            key2, dim = lines[1].split()
            if (key1, key2) != ("extractor_id", "dimension"):
                raise ValueError("bad header")
            vecs = [np.array([float(x) for x in lines[i].split()]) for i in (2, 3, 4)]
            return cls(ext_id.strip(), int(dim), *vecs)
        except (IndexError, ValueError) as exc:
            raise ClassifierError(f"malformed model file {path}: {exc}") from None


def _image_files(directory) -> list[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise ClassifierError(f"not a directory: {d}")
    return sorted(p for p in d.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)


def _corpus_features(directory) -> np.ndarray:
    feats = []
    for path in _image_files(directory):
        try:
            feats.append(extract_features(load_image(path)))
        except (OSError, UnidentifiedImageError, ValueError):
            continue
    if len(feats) < 2:
        raise ClassifierError(f"{directory}: need at least 2 decodable images, found {len(feats)}")
    return np.array(feats)


def train_from_features(art: np.ndarray, notart: np.ndarray) -> CentroidModel:
    art, notart = np.atleast_2d(art), np.atleast_2d(notart)
    if len(art) == 0 or len(notart) == 0:
        raise ClassifierError("both classes need at least one example")
    scale = np.maximum(np.vstack([art, notart]).std(axis=0), 1e-9)
    return CentroidModel(EXTRACTOR_ID, art.shape[1], scale,
                         (art / scale).mean(axis=0), (notart / scale).mean(axis=0))


def train(art_dir, notart_dir) -> CentroidModel:
    return train_from_features(_corpus_features(art_dir), _corpus_features(notart_dir))


def score_features(features: np.ndarray, model: CentroidModel) -> float:
    if model is None:
        raise ClassifierError("no trained model")
    if model.extractor_id != EXTRACTOR_ID or model.dimension != DIMENSION:
        raise ModelIncompatibleError(
            f"model built with {model.extractor_id}/{model.dimension}, "
            f"running {EXTRACTOR_ID}/{DIMENSION}")
    v = np.asarray(features, dtype=float) / model.scale
    d_art = float(np.linalg.norm(v - model.art_centroid))
    d_not = float(np.linalg.norm(v - model.notart_centroid))
    if d_art + d_not == 0.0:
        return 0.5
    return d_art / (d_art + d_not)


def score(image, model: CentroidModel) -> float:
    return score_features(extract_features(image), model)


def label_from_score(s: float) -> str:
    return "art" if s < 0.5 else "not-art"


def label(image, model: CentroidModel) -> str:
    return label_from_score(score(image, model))


@dataclass
class BatchReport:
    rows: list[tuple[str, float, str]]
    failures: list[tuple[str, str]]

    @property
    def counts(self) -> tuple[int, int]:
        art = sum(1 for _, _, lab in self.rows if lab == "art")
        return art, len(self.rows) - art

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("path", "score", "label"))
            for p, s, lab in self.rows:
                w.writerow((p, repr(s), lab))


def classify_batch(image_dir, model: CentroidModel) -> BatchReport:
    rows, failures = [], []
    for path in _image_files(image_dir):
        try:
            s = score(load_image(path), model)
        except (OSError, UnidentifiedImageError, ValueError) as exc:
            failures.append((str(path), str(exc)))
            continue
        rows.append((str(path), s, label_from_score(s)))
    return BatchReport(rows, failures)


def noise_image(size: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    w, h = size
    return rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)


def generate_noise_corpus(count: int, size: tuple[int, int], seed: int, out_dir) -> list[Path]:
    if count < 1:
        raise ValueError("count must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        p = out / f"noise_{i:04d}.png"
        Image.fromarray(noise_image(size, rng)).save(p, format="PNG")
        paths.append(p)
    return paths


def smooth_image(size: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    """Synthetic stand-in for an abstract-art corpus image.

    Either a dark ground or a two-colour gradient with low-frequency colour
    waves, overlaid with flat discs and thick sine bands: large smooth
    regions separated by crisp edges.
    """
    w, h = size
    yy, xx = np.mgrid[0:h, 0:w] / max(w, h)
    if rng.random() < 0.5:
        img = np.zeros((h, w, 3)) + rng.uniform(0, 12, 3)
    else:
        angle = rng.uniform(0, 2 * np.pi)
        t = np.cos(angle) * xx + np.sin(angle) * yy
        t = (t - t.min()) / max(np.ptp(t), 1e-9)
        c0, c1 = rng.uniform(0, 255, 3), rng.uniform(0, 255, 3)
        img = c0 + t[..., None] * (c1 - c0)
        for _ in range(int(rng.integers(1, 4))):
            f = rng.uniform(0.5, 3.0, 2)
            wave = np.sin(2 * np.pi * (f[0] * xx + f[1] * yy) + rng.uniform(0, 2 * np.pi))
            img += wave[..., None] * rng.uniform(-40, 40, 3)
    for _ in range(int(rng.integers(0, 6))):
        cx, cy, r = rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0.03, 0.2)
        disc = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        img[disc] = rng.uniform(0, 255, 3)
    for _ in range(int(rng.integers(0, 4))):
        centre = rng.uniform(0.1, 0.9) + rng.uniform(0, 0.3) * np.sin(
            2 * np.pi * rng.uniform(0.5, 4) * xx + rng.uniform(0, 2 * np.pi))
        band = np.abs(yy - centre) <= rng.uniform(0.005, 0.03)
        img[band] = rng.uniform(0, 255, 3)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def generate_smooth_corpus(count: int, size: tuple[int, int], seed: int, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        p = out / f"smooth_{i:04d}.png"
        Image.fromarray(smooth_image(size, rng)).save(p, format="PNG")
        paths.append(p)
    return paths


@functools.lru_cache(maxsize=8)
def synthetic_model(count: int = 50, size: tuple[int, int] = (128, 128), seed: int = 0) -> CentroidModel:
    """Model trained in memory on smooth synthetic images vs uniform noise."""
    rng = np.random.default_rng([seed, 1])
    art = np.array([extract_features(smooth_image(size, rng)) for _ in range(count)])
    notart = np.array([extract_features(noise_image(size, rng)) for _ in range(count)])
    return train_from_features(art, notart)
