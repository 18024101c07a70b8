"""Drawing techniques and genome expression.

Every technique has the signature ``draw(canvas, params, rng)`` where
``params`` maps parameter names (as declared in the registry) to values.
Missing entries fall back to the technique's defaults, which is handy when
calling a technique directly.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import ndimage

from .canvas import Canvas, palette
from .genome import Genome, Registry, TechniqueGene, default_registry, serialize
from .noise import NoiseField, angle_at

Clock = Callable[[], float]


class ExpressionError(RuntimeError):
    pass


NOISE_DEFAULTS = dict(noise_seed=0, octaves=3, falloff=0.5, scale=0.01)

DEFAULTS: dict[str, dict] = {
    "flow-field": dict(palette=0, particles=1000, steps=200, step_size=1.0, **NOISE_DEFAULTS),
    "flow-field-2": dict(palette=0, spacing=16, length=50, thickness=1, **NOISE_DEFAULTS),
    "circle-packing": dict(palette=0, attempts=500, min_radius=2, max_radius=40),
    "basic-trig": dict(palette=0, curves=3, amplitude=0.25, frequency=2.0,
                       phase=0.0, offset=0.5, thickness=2),
}


def _params(name: str, params: Mapping | None) -> dict:
    merged = dict(DEFAULTS[name])
    merged.update(params or {})
    return merged


def _noise(p: dict) -> NoiseField:
    return NoiseField(int(p["noise_seed"]), int(p["octaves"]), float(p["falloff"]), float(p["scale"]))


def _colors(pal_id: int, n: int, rng: np.random.Generator) -> np.ndarray:
    cols = np.array(palette(pal_id).colors, dtype=np.uint8)
    return cols[rng.integers(len(cols), size=n)]


def draw_flow_field(canvas: Canvas, params: Mapping | None, rng: np.random.Generator) -> None:
    """Particles advected through a noise angle field, one point per step."""
    p = _params("flow-field", params)
    n = int(p["particles"])
    if n <= 0:
        return
    field_ = _noise(p)
    step = float(p["step_size"])
    x = rng.uniform(0, canvas.width, n)
    y = rng.uniform(0, canvas.height, n)
    colors = _colors(p["palette"], n, rng)
    for _ in range(int(p["steps"])):
        canvas.plot(x, y, colors)
        theta = angle_at(field_, x, y)
        x = x + step * np.cos(theta)
        y = y + step * np.sin(theta)
        alive = (x >= 0) & (x < canvas.width) & (y >= 0) & (y < canvas.height)
        if not alive.all():
            x, y, colors = x[alive], y[alive], colors[alive]
            if x.size == 0:
                break


def _densify_segments(x0, y0, x1, y1, step: float = 0.5):
    dx, dy = x1 - x0, y1 - y0
    n = np.maximum(1, np.ceil(np.hypot(dx, dy) / step).astype(np.int64))
    seg = np.repeat(np.arange(dx.size), n)
    starts = np.cumsum(n) - n
    t = (np.arange(seg.size) - starts[seg]) / n[seg]
    return x0[seg] + dx[seg] * t, y0[seg] + dy[seg] * t, seg


FLOW2_STEP = 1.5


def draw_flow_field_2(canvas: Canvas, params: Mapping | None, rng: np.random.Generator) -> None:
    """Streamlines traced from a regular seed grid and stroked as polylines."""
    p = _params("flow-field-2", params)
    spacing = max(8, int(p["spacing"]))
    length = min(100, int(p["length"]))
    gx = np.arange(spacing / 2, canvas.width, spacing)
    gy = np.arange(spacing / 2, canvas.height, spacing)
    if gx.size == 0 or gy.size == 0 or length <= 0:
        return
    x, y = (a.ravel() for a in np.meshgrid(gx, gy))
    n = x.size
    colors = _colors(p["palette"], n, rng)
    field_ = _noise(p)
    xs = np.empty((length + 1, n))
    ys = np.empty((length + 1, n))
    xs[0], ys[0] = x, y
    alive = np.ones(n, dtype=bool)
    for s in range(length):
        theta = angle_at(field_, x, y)
        nx = x + FLOW2_STEP * np.cos(theta)
        ny = y + FLOW2_STEP * np.sin(theta)
        alive &= (nx >= 0) & (nx < canvas.width) & (ny >= 0) & (ny < canvas.height)
        # dead lines stay parked at their last on-canvas point
        x = np.where(alive, nx, x)
        y = np.where(alive, ny, y)
        xs[s + 1], ys[s + 1] = x, y
    px, py, seg = _densify_segments(xs[:-1].ravel(), ys[:-1].ravel(),
                                    xs[1:].ravel(), ys[1:].ravel(), step=1.0)
    # rasterise line ids once, then thicken by dilation instead of per-point stamps
    ix = np.rint(px).astype(np.int64)
    iy = np.rint(py).astype(np.int64)
    inside = (ix >= 0) & (ix < canvas.width) & (iy >= 0) & (iy < canvas.height)
    labels = np.zeros((canvas.height, canvas.width), dtype=np.int32)
    labels[iy[inside], ix[inside]] = seg[inside] % n + 1
    thickness = max(1, int(p["thickness"]))
    if thickness > 1:
        labels = ndimage.grey_dilation(labels, size=(thickness, thickness), mode="constant", cval=0)
    drawn = labels > 0
    canvas.pixels[drawn] = colors[labels[drawn] - 1]


SEPARATION = 1.0


def pack_circles(width: int, height: int, attempts: int, min_radius: int,
                 max_radius: int, rng: np.random.Generator) -> np.ndarray:
    """Rejection-sample then grow non-overlapping circles.

    Returns an array of rows ``(cx, cy, r)`` in acceptance order.  A
    proposal at ``min_radius`` must lie inside the canvas and keep
    ``SEPARATION`` pixels from every accepted circle; accepted circles grow
    one pixel at a time up to ``max_radius`` while that still holds.
    """
    circles = np.empty((max(attempts, 0), 3))
    k = 0
    xmax, ymax = width - 1, height - 1
    for _ in range(max(attempts, 0)):
        cx = rng.uniform(0, width)
        cy = rng.uniform(0, height)
        r0 = float(min_radius)
        edge = min(cx, cy, xmax - cx, ymax - cy)
        if edge < r0:
            continue
        if k:
            gap = np.hypot(circles[:k, 0] - cx, circles[:k, 1] - cy) - circles[:k, 2]
            room = gap.min() - SEPARATION
            if room < r0:
                continue
        else:
            room = math.inf
        grow = math.floor(min(edge, room, max(float(max_radius), r0)) - r0)
        circles[k] = (cx, cy, r0 + max(grow, 0))
        k += 1
    return circles[:k].copy()


def draw_circle_packing(canvas: Canvas, params: Mapping | None, rng: np.random.Generator) -> np.ndarray:
    p = _params("circle-packing", params)
    circles = pack_circles(canvas.width, canvas.height, int(p["attempts"]),
                           int(p["min_radius"]), int(p["max_radius"]), rng)
    colors = _colors(p["palette"], len(circles), rng)
    for (cx, cy, r), col in zip(circles, colors):
        canvas.fill_circle(cx, cy, r, col)
    return circles


PHASE_JITTER = 0.5


def draw_basic_trig(canvas: Canvas, params: Mapping | None, rng: np.random.Generator) -> None:
    """Sine curves across the canvas; amplitude and offset are fractions of height."""
    p = _params("basic-trig", params)
    cols = palette(p["palette"]).colors
    x = np.arange(canvas.width, dtype=float)
    amp = float(p["amplitude"]) * canvas.height
    off = float(p["offset"]) * canvas.height
    for i in range(int(p["curves"])):
        phase = float(p["phase"]) + rng.uniform(-PHASE_JITTER, PHASE_JITTER)
        y = off + amp * np.sin(float(p["frequency"]) * x / canvas.width * 2 * math.pi + phase)
        canvas.polyline(x, y, cols[i % len(cols)], int(p["thickness"]))


TECHNIQUES: dict[str, Callable] = {
    "flow-field": draw_flow_field,
    "flow-field-2": draw_flow_field_2,
    "circle-packing": draw_circle_packing,
    "basic-trig": draw_basic_trig,
}


@dataclass
class ExpressionReport:
    genes_expressed: int
    per_gene_time: list[float] = field(default_factory=list)
    truncated: bool = False


def genome_digest(genome: Genome) -> int:
    return int.from_bytes(hashlib.sha256(serialize(genome).encode()).digest()[:8], "big")


def gene_rngs(genome: Genome, seed: int) -> list[np.random.Generator]:
    """One independent render stream per gene, fixed by genome text and seed."""
    ss = np.random.SeedSequence([genome_digest(genome), int(seed)])
    return [np.random.default_rng(s) for s in ss.spawn(len(genome))]


def draw_gene(canvas: Canvas, gene: TechniqueGene, registry: Registry,
              rng: np.random.Generator) -> None:
    draw = TECHNIQUES.get(gene.technique)
    if draw is None or gene.technique not in registry:
        raise ExpressionError(f"no drawing routine for {gene.technique!r}")
    draw(canvas, gene.params(registry), rng)


def express(genome: Genome, canvas_size: tuple[int, int], budget: float = math.inf,
            clock: Clock = time.perf_counter, seed: int = 0,
            registry: Registry | None = None) -> tuple[Canvas, ExpressionReport]:
    """Render ``genome`` onto a fresh canvas under a time budget in seconds.

    The budget is checked before each gene; a gene that starts always
    finishes, so at least one gene is expressed.
    """
    if not budget > 0:
        raise ValueError("budget must be positive")
    registry = registry or default_registry()
    canvas = Canvas(*canvas_size)
    report = ExpressionReport(0)
    start = prev = clock()
    elapsed = 0.0
    for gene, rng in zip(genome, gene_rngs(genome, seed)):
        if elapsed >= budget:
            report.truncated = True
            break
        draw_gene(canvas, gene, registry, rng)
        now = clock()
        report.per_gene_time.append(now - prev)
        report.genes_expressed += 1
        prev = now
        elapsed = now - start
    return canvas, report


@dataclass
class TimingRow:
    technique: str
    invocations: int
    total_ms: float
    mean_ms: float
    genes: list[str] = field(default_factory=list, repr=False)


TIMING_HEADER = ("technique", "invocations", "total_ms", "mean_ms")


def time_techniques(registry: Registry, invocations: int = 100,
                    canvas_size: tuple[int, int] = (500, 500), seed: int = 0,
                    include_excluded: bool = True) -> list[TimingRow]:
    """Wall time of ``invocations`` randomly parameterised calls per technique."""
    if invocations < 1:
        raise ValueError("invocations must be >= 1")
    param_rng = np.random.default_rng([seed, 0])
    draw_rng = np.random.default_rng([seed, 1])
    rows = []
    for desc in registry:
        if desc.excluded and not include_excluded:
            continue
        total = 0.0
        genes = []
        for _ in range(invocations):
            gene = TechniqueGene(desc.name, tuple(p.sample(param_rng) for p in desc.params))
            genes.append(str(gene))
            canvas = Canvas(*canvas_size)
            t0 = time.perf_counter()
            draw_gene(canvas, gene, registry, draw_rng)
            total += time.perf_counter() - t0
        total_ms = total * 1000.0
        rows.append(TimingRow(desc.name, invocations, total_ms, total_ms / invocations, genes))
    return rows


def write_timing_csv(rows: list[TimingRow], path) -> None:
    import csv
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TIMING_HEADER)
        for r in rows:
            w.writerow([r.technique, r.invocations, f"{r.total_ms:.3f}", f"{r.mean_ms:.3f}"])
