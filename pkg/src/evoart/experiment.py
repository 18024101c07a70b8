"""Leave-x-out objective ablation: mask enumeration, seeded replicates, aggregation."""

from __future__ import annotations

import csv
import logging
import traceback
from collections import Counter
from dataclasses import dataclass, field, replace
from itertools import combinations
from pathlib import Path
from typing import Sequence

import numpy as np

from .classifier import CentroidModel
from .evolve import (EvolutionConfig, ObjectiveMask, final_generation, genome_from_cell,
                     is_complete, read_fitness_csv, run_evolution)
from .fitness import OBJECTIVES, is_maximized
from .genome import ConfigurationError, Registry, default_registry

log = logging.getLogger(__name__)

HEATMAP_HEADER = ("config", *OBJECTIVES)
SWEEP_HEADER = ("generation", "technique", "gene_fraction", "modal_fraction", "dominance")


class AggregationError(RuntimeError):
    pass


def enumerate_masks(objective_count: int = len(OBJECTIVES)) -> list[ObjectiveMask]:
    """All non-empty objective subsets in truth-table order (bit i = objective i)."""
    if not 1 <= objective_count <= len(OBJECTIVES):
        raise ValueError(f"objective_count must be in [1, {len(OBJECTIVES)}]")
    return [ObjectiveMask.from_index(i) for i in range(1, 2 ** objective_count)]


def cell_seed(base_seed: int, mask_index: int, replicate: int) -> int:
    return base_seed * 10**6 + mask_index * 10**3 + replicate


def cell_dir(root, mask: ObjectiveMask, replicate: int) -> Path:
    return Path(root) / f"ec{mask.index:02d}" / f"rep{replicate:02d}"


@dataclass
class ExperimentPlan:
    base: EvolutionConfig
    masks: list[ObjectiveMask] = field(default_factory=enumerate_masks)
    replicates: int = 15

    def __post_init__(self):
        if not self.masks:
            raise ConfigurationError("plan has no masks")
        if self.replicates < 1:
            raise ConfigurationError("replicates must be >= 1")
        if len({m.index for m in self.masks}) != len(self.masks):
            raise ConfigurationError("duplicate masks in plan")

    def cells(self):
        for mask in self.masks:
            for rep in range(self.replicates):
                cfg = replace(self.base, mask=mask, seed=cell_seed(self.base.seed, mask.index, rep))
                yield mask, rep, cfg


@dataclass
class ExperimentResults:
    root: Path
    completed: list[Path] = field(default_factory=list)
    skipped: list[Path] = field(default_factory=list)
    failed: list[tuple[Path, str]] = field(default_factory=list)


def run_experiment(plan: ExperimentPlan, out_root, registry: Registry | None = None,
                   model: CentroidModel | None = None, resume: bool = True) -> ExperimentResults:
    """Run every (mask, replicate) cell, skipping cells that already finished.

    A failing cell is logged to ``failures.log`` and the sweep carries on.
    """
    root = Path(out_root)
    root.mkdir(parents=True, exist_ok=True)
    results = ExperimentResults(root)
    for mask, rep, cfg in plan.cells():
        target = cell_dir(root, mask, rep)
        if resume and is_complete(target):
            results.skipped.append(target)
            continue
        log.info("running EC %s (#%d) replicate %d", mask, mask.index, rep)
        try:
            run_evolution(cfg, registry, model, out_dir=target)
            results.completed.append(target)
        except Exception as exc:
            results.failed.append((target, repr(exc)))
            with open(root / "failures.log", "a") as fh:
                fh.write(f"{target.relative_to(root)}\t{exc!r}\n{traceback.format_exc()}\n")
    return results


def _cell_means(run_dirs: Sequence[Path]) -> dict[str, float]:
    rows = []
    for d in run_dirs:
        rows.extend(final_generation(read_fitness_csv(d / "fitness.csv")))
    return {o: float(np.mean([float(r[o]) for r in rows])) for o in OBJECTIVES}


def completed_cells(results_root) -> dict[int, list[Path]]:
    root = Path(results_root)
    cells: dict[int, list[Path]] = {}
    for ec in sorted(root.glob("ec*")):
        if not ec.is_dir() or not ec.name[2:].isdigit():
            continue
        reps = sorted(r for r in ec.glob("rep*") if is_complete(r))
        if reps:
            cells[int(ec.name[2:])] = reps
    return cells


def heatmap(means: dict[int, dict[str, float]]) -> dict[int, dict[str, float]]:
    """Per-objective min-max normalisation across configurations; 1.0 = fittest.

    Minimisation objectives are negated first.  A row with no spread maps
    to 1.0 everywhere.
    """
    configs = sorted(means)
    out: dict[int, dict[str, float]] = {c: {} for c in configs}
    for o in OBJECTIVES:
        sign = 1.0 if is_maximized(o) else -1.0
        vals = np.array([sign * means[c][o] for c in configs])
        lo, hi = vals.min(), vals.max()
        for c, v in zip(configs, vals):
            out[c][o] = 1.0 if hi == lo else float((v - lo) / (hi - lo))
    return out


def aggregate(results_root, out_path=None) -> dict[int, dict[str, float]]:
    cells = completed_cells(results_root)
    if not cells:
        raise AggregationError(f"no completed cells under {results_root}")
    table = heatmap({c: _cell_means(dirs) for c, dirs in cells.items()})
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(HEATMAP_HEADER)
            for c in sorted(table):
                w.writerow([c, *(repr(table[c][o]) for o in OBJECTIVES)])
    return table


def modal_technique(techniques: Sequence[str], order: Sequence[str]) -> str:
    """Most frequent technique; ties go to the one listed first in ``order``."""
    counts = Counter(techniques)
    best = max(counts.values())
    return next(t for t in order if counts.get(t, 0) == best)


@dataclass
class GenerationSweep:
    generation: int
    gene_fraction: dict[str, float]
    modal_fraction: dict[str, float]

    @property
    def dominance(self) -> float:
        return max(self.modal_fraction.values()) if self.modal_fraction else 0.0


def sweep_statistics(run_dir, registry: Registry | None = None) -> list[GenerationSweep]:
    """Per-generation technique shares and the dominance index of a logged run.

    Gene shares come from ``technique_census.csv``; modal-technique shares
    are recounted from the genomes in ``fitness.csv``.
    """
    registry = registry or default_registry()
    run_dir = Path(run_dir)
    names = registry.names
    census: dict[int, dict[str, int]] = {}
    with open(run_dir / "technique_census.csv", newline="") as fh:
        for r in csv.DictReader(fh):
            census.setdefault(int(r["generation"]), {})[r["technique"]] = int(r["gene_count"])
    modal: dict[int, Counter] = {}
    sizes: Counter = Counter()
    for r in read_fitness_csv(run_dir / "fitness.csv"):
        gen = int(r["generation"])
        genome = genome_from_cell(r["genome"], registry)
        modal.setdefault(gen, Counter())[modal_technique(genome.techniques, names)] += 1
        sizes[gen] += 1
    out = []
    for gen in sorted(census):
        total = sum(census[gen].values())
        out.append(GenerationSweep(
            gen,
            {t: census[gen].get(t, 0) / total for t in names},
            {t: modal.get(gen, Counter())[t] / sizes[gen] for t in names},
        ))
    return out


def write_sweeps(sweeps: Sequence[GenerationSweep], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for s in sweeps:
            for t in s.gene_fraction:
                w.writerow([s.generation, t, repr(s.gene_fraction[t]),
                            repr(s.modal_fraction[t]), repr(s.dominance)])


def masks_from_text(text: str) -> list[ObjectiveMask]:
    """``all`` or a ``;``-separated list of masks, each ``pc,gc`` style or a number."""
    text = text.strip()
    if text == "all":
        return enumerate_masks()
    return [ObjectiveMask.parse(part) for part in text.split(";") if part.strip()]


def leave_out_masks(k: int) -> list[ObjectiveMask]:
    """Masks with exactly ``k`` objectives left out."""
    keep = len(OBJECTIVES) - k
    return sorted((ObjectiveMask(frozenset(c)) for c in combinations(OBJECTIVES, keep)),
                  key=lambda m: m.index)
