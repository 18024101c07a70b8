"""Epsilon-lexicase selection and the generational loop."""

from __future__ import annotations

import csv
import hashlib
import logging
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .classifier import CentroidModel, synthetic_model
from .fitness import OBJECTIVES, Evaluated, evaluate_population, is_maximized
from .genome import (ConfigurationError, Genome, Registry, crossover, default_registry,
                     mutate, random_genome, serialize)

log = logging.getLogger(__name__)

FITNESS_HEADER = ("generation", "individual", *OBJECTIVES,
                  "genes_expressed", "truncated", "genome")
CENSUS_HEADER = ("generation", "technique", "gene_count", "individuals_using")
MANIFEST = "run_manifest"
# genes are separated by ';' inside CSV cells so each individual is one line
GENE_SEP = ";"


@dataclass(frozen=True)
class ObjectiveMask:
    active: frozenset

    def __post_init__(self):
        active = frozenset(self.active)
        if not active:
            raise ConfigurationError("an objective mask needs at least one objective")
        unknown = active - set(OBJECTIVES)
        if unknown:
            raise ConfigurationError(f"unknown objectives {sorted(unknown)}")
        object.__setattr__(self, "active", active)

    @classmethod
    def of(cls, *objectives: str) -> ObjectiveMask:
        return cls(frozenset(objectives))

    @classmethod
    def parse(cls, text: str) -> ObjectiveMask:
        text = text.strip()
        if text == "all":
            return cls(frozenset(OBJECTIVES))
        if text.isdigit():
            return cls.from_index(int(text))
        return cls(frozenset(t.strip() for t in text.split(",") if t.strip()))

    @classmethod
    def from_index(cls, index: int) -> ObjectiveMask:
        if not 1 <= index < 2 ** len(OBJECTIVES):
            raise ConfigurationError(f"mask index {index} out of range")
        return cls(frozenset(o for b, o in enumerate(OBJECTIVES) if index >> b & 1))

    @property
    def index(self) -> int:
        """Truth-table number: bit i set when the i-th objective is active."""
        return sum(1 << b for b, o in enumerate(OBJECTIVES) if o in self.active)

    @property
    def ordered(self) -> tuple[str, ...]:
        return tuple(o for o in OBJECTIVES if o in self.active)

    def __str__(self) -> str:
        return ",".join(self.ordered)


ALL_OBJECTIVES = ObjectiveMask(frozenset(OBJECTIVES))


@dataclass
class EvolutionConfig:
    population_size: int = 100
    generations: int = 100
    crossover_rate: float = 0.5
    mutation_rate: float = 0.4
    epsilon: float = 0.85
    eval_budget: float = 180.0
    width: int = 500
    height: int = 500
    seed: int = 0
    mask: ObjectiveMask = ALL_OBJECTIVES
    exclude: tuple[str, ...] = ()
    min_len: int = 1
    max_len: int = 5
    model: str = ""
    jobs: int = 1

    def validate(self) -> None:
        if self.population_size < 2:
            raise ConfigurationError("population_size must be >= 2")
        if self.generations < 0:
            raise ConfigurationError("generations must be >= 0")
        for name in ("crossover_rate", "mutation_rate", "epsilon"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1]")
        if not self.eval_budget > 0:
            raise ConfigurationError("eval_budget must be positive")
        if self.width < 1 or self.height < 1:
            raise ConfigurationError("canvas size must be positive")
        if not 1 <= self.min_len <= self.max_len:
            raise ConfigurationError("need 1 <= min_len <= max_len")

    @property
    def canvas_size(self) -> tuple[int, int]:
        return self.width, self.height

    def registry(self, base: Registry | None = None) -> Registry:
        return (base or default_registry()).with_exclusions(self.exclude)

    @classmethod
    def from_items(cls, items: dict[str, str]) -> EvolutionConfig:
        """Build a config from ``key -> text`` pairs; unknown keys are errors."""
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, text in items.items():
            if key not in known:
                raise ConfigurationError(f"unknown config key {key!r}")
            default = known[key].default
            try:
                if key == "mask":
                    kwargs[key] = ObjectiveMask.parse(text)
                elif key == "exclude":
                    kwargs[key] = tuple(t.strip() for t in text.split(",") if t.strip())
                elif isinstance(default, bool):
                    kwargs[key] = text.lower() in ("1", "true", "yes")
                elif isinstance(default, int):
                    kwargs[key] = int(text)
                elif isinstance(default, float):
                    kwargs[key] = float(text)
                else:
                    kwargs[key] = text
            except ValueError as exc:
                raise ConfigurationError(f"bad value for {key!r}: {text!r}") from exc
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def from_text(cls, text: str) -> EvolutionConfig:
        return cls.from_items(parse_key_values(text))

    @classmethod
    def load(cls, path) -> EvolutionConfig:
        return cls.from_text(Path(path).read_text())

    def to_items(self) -> list[tuple[str, str]]:
        """Result-affecting settings as text; ``jobs`` is left out on purpose."""
        items = []
        for f in fields(self):
            if f.name == "jobs":
                continue
            v = getattr(self, f.name)
            if isinstance(v, (tuple, list)):
                v = ",".join(v)
            items.append((f.name, str(v)))
        return items


def parse_key_values(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment, blank lines are ignored."""
    items = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"config line {n}: expected 'key = value'")
        items[key.strip()] = value.strip()
    return items


def oriented_matrix(population: Sequence[Evaluated], objectives: Sequence[str]) -> np.ndarray:
    """Objective values with minimisation objectives negated (higher is fitter)."""
    m = np.array([[ind.fitness[o] for o in objectives] for ind in population], dtype=float)
    signs = np.array([1.0 if is_maximized(o) else -1.0 for o in objectives])
    return m * signs


def lexicase_pool(values: np.ndarray, order: Iterable[int], epsilon: float,
                  pool: np.ndarray | None = None) -> np.ndarray:
    """Filter candidate indices through the objective columns in ``order``.

    At each step the column is min-max normalised over the current pool and
    candidates below ``1 - epsilon`` are dropped.  Stops early once a single
    candidate remains.
    """
    pool = np.arange(values.shape[0]) if pool is None else np.asarray(pool)
    for k in order:
        if pool.size <= 1:
            break
        col = values[pool, k]
        lo, hi = col.min(), col.max()
        if hi == lo:
            continue
        norm = (col - lo) / (hi - lo)
        pool = pool[norm >= 1.0 - epsilon]
    return pool


def select_index(values: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    order = rng.permutation(values.shape[1])
    pool = lexicase_pool(values, order, epsilon)
    if pool.size == 1:
        return int(pool[0])
    return int(pool[rng.integers(pool.size)])


def lexicase_select(population: Sequence[Evaluated], mask: ObjectiveMask, epsilon: float,
                    rng: np.random.Generator) -> Evaluated:
    values = oriented_matrix(population, mask.ordered)
    return population[select_index(values, epsilon, rng)]


def next_generation(population: Sequence[Evaluated], config: EvolutionConfig,
                    registry: Registry, rng: np.random.Generator) -> list[Genome]:
    """Full generational replacement: two lexicase parents per child, no elitism."""
    values = oriented_matrix(population, config.mask.ordered)
    children = []
    for _ in range(len(population)):
        a = population[select_index(values, config.epsilon, rng)].genome
        b = population[select_index(values, config.epsilon, rng)].genome
        child = crossover(a, b, rng, config.crossover_rate)
        children.append(mutate(child, registry, rng, config.mutation_rate))
    return children


@dataclass
class RunLog:
    config: EvolutionConfig
    fitness_rows: list[tuple] = field(default_factory=list)
    census_rows: list[tuple] = field(default_factory=list)
    genomes: list[list[Genome]] = field(default_factory=list)
    final: list[Evaluated] = field(default_factory=list)
    model_sha256: str = ""

    def generation_rows(self, generation: int) -> list[tuple]:
        return [r for r in self.fitness_rows if r[0] == generation]


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def fitness_rows(generation: int, population: Sequence[Evaluated]) -> list[tuple]:
    rows = []
    for i, ind in enumerate(population):
        rows.append((generation, i, *ind.fitness.as_tuple(), ind.report.genes_expressed,
                     int(ind.report.truncated), serialize(ind.genome).replace("\n", GENE_SEP)))
    return rows


def census_rows(generation: int, genomes: Sequence[Genome], registry: Registry) -> list[tuple]:
    rows = []
    for name in registry.names:
        genes = sum(g.techniques.count(name) for g in genomes)
        users = sum(1 for g in genomes if name in g.techniques)
        rows.append((generation, name, genes, users))
    return rows


def resolve_model(config: EvolutionConfig, model: CentroidModel | None) -> CentroidModel:
    if model is not None:
        return model
    if config.model:
        return CentroidModel.load(config.model)
    return synthetic_model()


def model_digest(model: CentroidModel) -> str:
    h = hashlib.sha256(model.extractor_id.encode())
    for v in (model.scale, model.art_centroid, model.notart_centroid):
        h.update(np.ascontiguousarray(v, dtype="<f8").tobytes())
    return h.hexdigest()


def run_evolution(config: EvolutionConfig, registry: Registry | None = None,
                  model: CentroidModel | None = None, out_dir=None) -> RunLog:
    """Evolve a population and optionally persist the run under ``out_dir``.

    ``generations`` counts variation rounds, so ``generations + 1``
    populations are evaluated and logged (0 .. generations).
    """
    config.validate()
    registry = config.registry(registry)
    if not registry.active:
        raise ConfigurationError("every technique is excluded")
    model = resolve_model(config, model)
    rng = np.random.default_rng(config.seed)
    population = [random_genome(registry, rng, config.min_len, config.max_len)
                  for _ in range(config.population_size)]
    run = RunLog(config, model_sha256=model_digest(model))
    for gen in range(config.generations + 1):
        evaluated = evaluate_population(population, config.eval_budget, model, registry,
                                        config.seed, config.canvas_size, config.jobs)
        run.fitness_rows.extend(fitness_rows(gen, evaluated))
        run.census_rows.extend(census_rows(gen, population, registry))
        run.genomes.append(list(population))
        log.info("generation %d: mean %s", gen, {
            o: round(float(np.mean([e.fitness[o] for e in evaluated])), 4) for o in OBJECTIVES})
        if gen == config.generations:
            run.final = evaluated
        else:
            population = next_generation(evaluated, config, registry, rng)
    if out_dir is not None:
        write_run(run, out_dir)
    return run


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_run(run: RunLog, out_dir) -> Path:
    """Persist a run; the manifest is written last and marks completion."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fit = out / "fitness.csv"
    census = out / "technique_census.csv"
    _write_csv(fit, FITNESS_HEADER, run.fitness_rows)
    _write_csv(census, CENSUS_HEADER, run.census_rows)
    g = run.config.generations
    for i, ind in enumerate(run.final):
        ind.canvas.save(out / f"gen{g}_ind{i}.png")
    lines = [f"{k} = {v}" for k, v in run.config.to_items()]
    lines.append(f"version = {__version__}")
    lines.append(f"model_sha256 = {run.model_sha256}")
    lines.append(f"fitness_sha256 = {_sha256(fit)}")
    lines.append(f"census_sha256 = {_sha256(census)}")
    tmp = out / (MANIFEST + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    os.replace(tmp, out / MANIFEST)
    return out


def read_fitness_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def genome_from_cell(cell: str, registry: Registry) -> Genome:
    from .genome import parse
    return parse(cell.replace(GENE_SEP, "\n"), registry)


def is_complete(run_dir) -> bool:
    return (Path(run_dir) / MANIFEST).is_file()


def final_generation(rows: list[dict]) -> list[dict]:
    if not rows:
        return []
    last = max(int(r["generation"]) for r in rows)
    return [r for r in rows if int(r["generation"]) == last]
