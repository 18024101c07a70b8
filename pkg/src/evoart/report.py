"""Collages of image directories and direct rendering of genome text."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .canvas import BLACK, load_image
from .classifier import IMAGE_SUFFIXES
from .genome import Registry, default_registry, parse
from .techniques import ExpressionReport, express


class ReportError(RuntimeError):
    pass


def nearest_resize(pixels: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    w, h = size
    rows = (np.arange(h) * pixels.shape[0]) // h
    cols = (np.arange(w) * pixels.shape[1]) // w
    return pixels[np.ix_(rows, cols)]


def collage(image_dir, columns: int, cell_size: tuple[int, int], out_path,
            background=BLACK) -> tuple[int, int]:
    """Tile the images of ``image_dir`` (sorted by name) into a grid PNG.

    Returns the collage size as (width, height).
    """
    if columns < 1:
        raise ReportError("columns must be >= 1")
    tiles = []
    for p in sorted(Path(image_dir).iterdir()) if Path(image_dir).is_dir() else []:
        if p.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        try:
            tiles.append(load_image(p))
        except (OSError, UnidentifiedImageError):
            continue
    if not tiles:
        raise ReportError(f"no decodable images in {image_dir}")
    cw, ch = cell_size
    rows = math.ceil(len(tiles) / columns)
    sheet = np.empty((rows * ch, columns * cw, 3), dtype=np.uint8)
    sheet[:] = background
    for k, tile in enumerate(tiles):
        r, c = divmod(k, columns)
        sheet[r * ch:(r + 1) * ch, c * cw:(c + 1) * cw] = nearest_resize(tile, cell_size)
    Image.fromarray(sheet).save(out_path, format="PNG")
    return columns * cw, rows * ch


def render_genome(genome_text: str, size: tuple[int, int], seed: int, budget: float,
                  out_path, registry: Registry | None = None) -> ExpressionReport:
    """Parse, express and save a genome; parse errors propagate with their line."""
    registry = registry or default_registry()
    genome = parse(genome_text, registry)
    canvas, report = express(genome, size, budget, seed=seed, registry=registry)
    canvas.save(out_path)
    return report


def format_report(report: ExpressionReport) -> str:
    per_gene = ", ".join(f"{t * 1000:.1f}" for t in report.per_gene_time)
    return (f"genes expressed: {report.genes_expressed}\n"
            f"per-gene ms: [{per_gene}]\n"
            f"truncated: {str(report.truncated).lower()}")
