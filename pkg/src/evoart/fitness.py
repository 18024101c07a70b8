"""The six selection objectives and population evaluation.

=====  ========  ===============================================
id     goal      measure
=====  ========  ===============================================
pc     maximize  mean RMS pixel difference to the other images
gc     minimize  number of duplicate genes
ut     maximize  share of available techniques used
cd     maximize  mean Chebyshev difference to the other images
ns     minimize  distance of negative-space share from 70 %
ac     minimize  relative distance to the "art" centroid
=====  ========  ===============================================
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .canvas import Canvas
from .genome import Genome, Registry, duplicate_gene_count
from .techniques import ExpressionReport, express

log = logging.getLogger(__name__)

OBJECTIVES = ("pc", "gc", "ut", "cd", "ns", "ac")
MAXIMIZE = frozenset({"pc", "ut", "cd"})
NEGATIVE_SPACE_TARGET = 0.70
BACKGROUND_TOLERANCE = 8


class MetricError(ValueError):
    pass


def is_maximized(objective: str) -> bool:
    if objective not in OBJECTIVES:
        raise KeyError(objective)
    return objective in MAXIMIZE


@dataclass(frozen=True)
class FitnessVector:
    pc: float
    gc: float
    ut: float
    cd: float
    ns: float
    ac: float

    def __getitem__(self, objective: str) -> float:
        if objective not in OBJECTIVES:
            raise KeyError(objective)
        return getattr(self, objective)

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, o) for o in OBJECTIVES)


def _pixels(image) -> np.ndarray:
    return image.pixels if isinstance(image, Canvas) else np.asarray(image)


def rms_difference(a, b) -> float:
    a, b = _pixels(a), _pixels(b)
    if a.shape != b.shape:
        raise MetricError(f"image shapes differ: {a.shape} vs {b.shape}")
    d = a.astype(np.int64) - b.astype(np.int64)
    return math.sqrt(int(np.dot(d.ravel(), d.ravel())) / d.size)


def chebyshev_difference(a, b) -> float:
    a, b = _pixels(a), _pixels(b)
    if a.shape != b.shape:
        raise MetricError(f"image shapes differ: {a.shape} vs {b.shape}")
    return float(np.abs(a.astype(np.int16) - b.astype(np.int16)).max())


def pairwise_matrix(images: Sequence, metric) -> np.ndarray:
    n = len(images)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = metric(images[i], images[j])
    return out


def _mean_to_others(matrix: np.ndarray, index: int) -> float:
    n = matrix.shape[0]
    if n < 2:
        return 0.0
    return math.fsum(matrix[index, j] for j in range(n) if j != index) / (n - 1)


def ff_pc(index: int, images: Sequence) -> float:
    n = len(images)
    if n < 2:
        return 0.0
    return math.fsum(rms_difference(images[index], images[j])
                     for j in range(n) if j != index) / (n - 1)


def ff_cd(index: int, images: Sequence) -> float:
    n = len(images)
    if n < 2:
        return 0.0
    return math.fsum(chebyshev_difference(images[index], images[j])
                     for j in range(n) if j != index) / (n - 1)


def ff_gc(genome: Genome) -> float:
    return float(duplicate_gene_count(genome))


def ff_ut(genome: Genome, registry: Registry) -> float:
    available = len(registry.active)
    if available == 0:
        raise MetricError("registry has no active techniques")
    return len(set(genome.techniques)) / available


def background_fraction(canvas: Canvas, background=None, tolerance: int = BACKGROUND_TOLERANCE) -> float:
    bg = np.array(canvas.background if background is None else background, dtype=np.int16)
    close = np.abs(canvas.pixels.astype(np.int16) - bg) <= tolerance
    return float(close.all(axis=2).mean())


def ff_ns(canvas: Canvas, background=None, tolerance: int = BACKGROUND_TOLERANCE) -> float:
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    return abs(background_fraction(canvas, background, tolerance) - NEGATIVE_SPACE_TARGET)


def ff_ac(canvas: Canvas, model) -> float:
    from .classifier import score
    return score(canvas, model)


def worst_vector(genome: Genome, registry: Registry) -> FitnessVector:
    return FitnessVector(
        pc=0.0, gc=float(max(len(genome) - 1, 0)), ut=1.0 / max(len(registry.active), 1),
        cd=0.0, ns=NEGATIVE_SPACE_TARGET, ac=1.0,
    )


@dataclass
class Evaluated:
    genome: Genome
    canvas: Canvas
    fitness: FitnessVector
    report: ExpressionReport
    failed: bool = False


def _express_one(args):
    genome, size, budget, seed, registry = args
    try:
        canvas, report = express(genome, size, budget, seed=seed, registry=registry)
        return canvas, report, None
    except Exception as exc:  # recorded as a failed individual
        return None, None, repr(exc)


def evaluate_population(genomes: Sequence[Genome], budget: float, model, registry: Registry,
                        seed: int, canvas_size: tuple[int, int] = (500, 500),
                        jobs: int = 1) -> list[Evaluated]:
    """Express every genome, then score all six objectives.

    Pairwise objectives (pc, cd) are computed over the full set of rendered
    canvases.  Individuals whose expression or scoring raises get
    worst-case values and a blank canvas instead of aborting the run.
    """
    if not genomes:
        raise ValueError("empty population")
    tasks = [(g, canvas_size, budget, seed, registry) for g in genomes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rendered = list(pool.map(_express_one, tasks))
    else:
        rendered = [_express_one(t) for t in tasks]

    canvases, reports, failed = [], [], []
    for genome, (canvas, report, err) in zip(genomes, rendered):
        if err is not None:
            log.warning("expression failed for %r: %s", str(genome.genes[0]), err)
            canvas, report = Canvas(*canvas_size), ExpressionReport(0, [], True)
        canvases.append(canvas)
        reports.append(report)
        failed.append(err is not None)

    rms = pairwise_matrix(canvases, rms_difference)
    cheb = pairwise_matrix(canvases, chebyshev_difference)
    out = []
    for i, genome in enumerate(genomes):
        if failed[i]:
            fv = worst_vector(genome, registry)
        else:
            try:
                fv = FitnessVector(
                    pc=_mean_to_others(rms, i),
                    gc=ff_gc(genome),
                    ut=ff_ut(genome, registry),
                    cd=_mean_to_others(cheb, i),
                    ns=ff_ns(canvases[i]),
                    ac=ff_ac(canvases[i], model),
                )
            except Exception as exc:
                log.warning("scoring failed for individual %d: %r", i, exc)
                fv, failed[i] = worst_vector(genome, registry), True
        out.append(Evaluated(genome, canvases[i], fv, reports[i], failed[i]))
    return out
