"""Drawing-program genomes: technique grammar, text format and variation.

A genome is an ordered list of genes; each gene names a drawing technique
and carries one value per parameter of that technique.  The text form is
one gene per line::

    circle-packing:3,800,4,60
    basic-trig:1,4,0.25,2.0,1.5708,0.5,2

A technique without parameters is written as its bare name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence, Union

import numpy as np

Value = Union[int, float, str]

INT = "integer-range"
REAL = "real-range"
CATEGORICAL = "categorical"

# sampled reals are rounded so genome text stays readable
REAL_DIGITS = 4


class GenomeError(ValueError):
    """Base class for genome parse and validation errors."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyGenomeError(GenomeError):
    pass


class MalformedGeneError(GenomeError):
    pass


class UnknownTechniqueError(GenomeError):
    pass


class ArityError(GenomeError):
    pass


class OutOfDomainError(GenomeError):
    pass


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class ParamDomain:
    name: str
    kind: str
    low: float | int | None = None
    high: float | int | None = None
    choices: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind in (INT, REAL):
            if self.low is None or self.high is None or self.low > self.high:
                raise ConfigurationError(f"bad bounds for parameter {self.name!r}")
        elif self.kind == CATEGORICAL:
            if not self.choices:
                raise ConfigurationError(f"no categories for parameter {self.name!r}")
        else:
            raise ConfigurationError(f"unknown parameter kind {self.kind!r}")

    def sample(self, rng: np.random.Generator) -> Value:
        if self.kind == INT:
            return int(rng.integers(self.low, self.high, endpoint=True))
        if self.kind == REAL:
            value = round(float(rng.uniform(self.low, self.high)), REAL_DIGITS)
            return min(max(value, self.low), self.high)
        return self.choices[int(rng.integers(len(self.choices)))]

    def contains(self, value: Value) -> bool:
        if self.kind == INT:
            return isinstance(value, int) and self.low <= value <= self.high
        if self.kind == REAL:
            return (isinstance(value, float) and math.isfinite(value)
                    and self.low <= value <= self.high)
        return value in self.choices

    def format(self, value: Value) -> str:
        if self.kind == REAL:
            return repr(float(value))
        return str(value)

    def parse(self, token: str, line: int | None = None) -> Value:
        try:
            if self.kind == INT:
                value: Value = int(token)
            elif self.kind == REAL:
                value = float(token)
            else:
                value = token
        except ValueError:
            raise MalformedGeneError(
                f"cannot read {token!r} as a value of {self.name!r}", line) from None
        if not self.contains(value):
            raise OutOfDomainError(f"{self.name}={token} outside its domain", line)
        return value


def int_param(name: str, low: int, high: int) -> ParamDomain:
    return ParamDomain(name, INT, low, high)


def real_param(name: str, low: float, high: float) -> ParamDomain:
    return ParamDomain(name, REAL, float(low), float(high))


def categorical_param(name: str, choices: Iterable[str]) -> ParamDomain:
    return ParamDomain(name, CATEGORICAL, choices=tuple(choices))


@dataclass(frozen=True)
class TechniqueDescriptor:
    name: str
    params: tuple[ParamDomain, ...] = ()
    excluded: bool = False

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)


class Registry:
    """Ordered, name-unique collection of technique descriptors."""

    def __init__(self, descriptors: Iterable[TechniqueDescriptor]):
        self._by_name: dict[str, TechniqueDescriptor] = {}
        for d in descriptors:
            if d.name in self._by_name:
                raise ConfigurationError(f"duplicate technique {d.name!r}")
            if not d.name or any(c in d.name for c in ":,\n \t"):
                raise ConfigurationError(f"illegal technique name {d.name!r}")
            self._by_name[d.name] = d

    def __getitem__(self, name: str) -> TechniqueDescriptor:
        return self._by_name[name]

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def __iter__(self):
        return iter(self._by_name.values())

    def __len__(self) -> int:
        return len(self._by_name)

    @property
    def names(self) -> list[str]:
        return list(self._by_name)

    @property
    def active(self) -> list[TechniqueDescriptor]:
        return [d for d in self if not d.excluded]

    def with_exclusions(self, names: Iterable[str]) -> Registry:
        """Copy of the registry with exactly ``names`` excluded from sampling."""
        names = set(names)
        unknown = names - set(self._by_name)
        if unknown:
            raise ConfigurationError(f"cannot exclude unknown techniques {sorted(unknown)}")
        return Registry(replace(d, excluded=d.name in names) for d in self)


def default_registry(exclude: Iterable[str] = ()) -> Registry:
    """The four built-in techniques with their parameter domains.

    Amplitude and offset of ``basic-trig`` and the noise ``scale`` are
    relative quantities (fractions of canvas height, cycles per pixel), so
    a genome renders comparably at any canvas size.
    """
    noise = (
        int_param("noise_seed", 0, 9999),
        int_param("octaves", 1, 6),
        real_param("falloff", 0.2, 1.0),
        real_param("scale", 0.002, 0.03),
    )
    registry = Registry([
        TechniqueDescriptor("flow-field", (
            int_param("palette", 0, 7),
            int_param("particles", 100, 5000),
            int_param("steps", 50, 1000),
            real_param("step_size", 0.5, 3.0),
        ) + noise),
        TechniqueDescriptor("flow-field-2", (
            int_param("palette", 0, 7),
            int_param("spacing", 8, 64),
            int_param("length", 10, 100),
            int_param("thickness", 1, 4),
        ) + noise),
        TechniqueDescriptor("circle-packing", (
            int_param("palette", 0, 7),
            int_param("attempts", 10, 2000),
            int_param("min_radius", 2, 10),
            int_param("max_radius", 10, 100),
        )),
        TechniqueDescriptor("basic-trig", (
            int_param("palette", 0, 7),
            int_param("curves", 1, 12),
            real_param("amplitude", 0.0, 0.5),
            real_param("frequency", 0.5, 8.0),
            real_param("phase", 0.0, 2 * math.pi),
            real_param("offset", 0.0, 1.0),
            int_param("thickness", 1, 6),
        )),
    ])
    return registry.with_exclusions(exclude)


@dataclass(frozen=True)
class TechniqueGene:
    technique: str
    args: tuple[Value, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.technique
        return self.technique + ":" + ",".join(_format_value(v) for v in self.args)

    def params(self, registry: Registry) -> dict[str, Value]:
        return dict(zip(registry[self.technique].param_names, self.args))


def _format_value(value: Value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class Genome:
    genes: tuple[TechniqueGene, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.genes) < 1:
            raise EmptyGenomeError("a genome needs at least one gene")
        object.__setattr__(self, "genes", tuple(self.genes))

    def __len__(self) -> int:
        return len(self.genes)

    def __iter__(self):
        return iter(self.genes)

    def __getitem__(self, i):
        return self.genes[i]

    @property
    def techniques(self) -> list[str]:
        return [g.technique for g in self.genes]


def validate_gene(gene: TechniqueGene, registry: Registry) -> None:
    if gene.technique not in registry:
        raise UnknownTechniqueError(f"unknown technique {gene.technique!r}")
    domains = registry[gene.technique].params
    if len(domains) != len(gene.args):
        raise ArityError(
            f"{gene.technique} takes {len(domains)} values, got {len(gene.args)}")
    for dom, value in zip(domains, gene.args):
        if not dom.contains(value):
            raise OutOfDomainError(f"{gene.technique}.{dom.name}={value!r} outside its domain")


def validate(genome: Genome, registry: Registry) -> None:
    for gene in genome:
        validate_gene(gene, registry)


def random_gene(registry: Registry, rng: np.random.Generator) -> TechniqueGene:
    active = registry.active
    if not active:
        raise ConfigurationError("every technique is excluded")
    desc = active[int(rng.integers(len(active)))]
    return TechniqueGene(desc.name, tuple(p.sample(rng) for p in desc.params))


def random_genome(registry: Registry, rng: np.random.Generator,
                  min_len: int = 1, max_len: int = 5) -> Genome:
    if not 1 <= min_len <= max_len:
        raise ValueError(f"need 1 <= min_len <= max_len, got {min_len}, {max_len}")
    n = int(rng.integers(min_len, max_len, endpoint=True))
    return Genome(tuple(random_gene(registry, rng) for _ in range(n)))


def serialize(genome: Genome) -> str:
    return "\n".join(str(g) for g in genome)


def parse(text: str, registry: Registry) -> Genome:
    """Parse genome text, validating every value against ``registry``.

    Raises a subclass of :class:`GenomeError` carrying the offending line.
    """
    text = text.strip()
    if not text:
        raise EmptyGenomeError("empty genome text")
    genes = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.strip()
        if not line:
            raise MalformedGeneError("blank line", lineno)
        name, sep, rest = line.partition(":")
        if not name:
            raise MalformedGeneError("missing technique name", lineno)
        if name not in registry:
            raise UnknownTechniqueError(f"unknown technique {name!r}", lineno)
        desc = registry[name]
        if sep and not rest:
            raise MalformedGeneError(f"{name!r} has ':' but no values", lineno)
        tokens = rest.split(",") if sep else []
        if any(t == "" or t != t.strip() for t in tokens):
            raise MalformedGeneError("empty or padded value", lineno)
        if len(tokens) != len(desc.params):
            raise ArityError(
                f"{name} takes {len(desc.params)} values, got {len(tokens)}", lineno)
        args = tuple(d.parse(t, lineno) for d, t in zip(desc.params, tokens))
        genes.append(TechniqueGene(name, args))
    return Genome(tuple(genes))


def crossover(parent_a: Genome, parent_b: Genome, rng: np.random.Generator,
              rate: float = 0.5) -> Genome:
    """Variable-length single-point crossover.

    With probability ``rate`` the child is ``a[:i] + b[j:]`` with
    ``i`` uniform on ``[1, len(a)]`` and ``j`` uniform on ``[0, len(b) - 1]``;
    otherwise it is a copy of ``parent_a``.  Equal parents always yield the
    parent itself.
    """
    if rng.random() >= rate:
        return parent_a
    i = int(rng.integers(1, len(parent_a), endpoint=True))
    j = int(rng.integers(0, len(parent_b)))
    if parent_a == parent_b:
        return parent_a
    return Genome(parent_a.genes[:i] + parent_b.genes[j:])


MUTATION_MODES = ("replace", "resample", "shuffle")


def apply_mutation(genome: Genome, registry: Registry, rng: np.random.Generator,
                   mode: str) -> Genome:
    genes = list(genome.genes)
    if mode == "replace":
        genes[int(rng.integers(len(genes)))] = random_gene(registry, rng)
    elif mode == "resample":
        k = int(rng.integers(len(genes)))
        desc = registry[genes[k].technique]
        genes[k] = TechniqueGene(desc.name, tuple(p.sample(rng) for p in desc.params))
    elif mode == "shuffle":
        genes = [genes[i] for i in rng.permutation(len(genes))]
    else:
        raise ValueError(f"unknown mutation mode {mode!r}")
    return Genome(tuple(genes))


def mutate(genome: Genome, registry: Registry, rng: np.random.Generator,
           rate: float = 0.4) -> Genome:
    if rng.random() >= rate:
        return genome
    mode = MUTATION_MODES[int(rng.integers(len(MUTATION_MODES)))]
    return apply_mutation(genome, registry, rng, mode)


def duplicate_gene_count(genome: Genome) -> int:
    return len(genome) - len({str(g) for g in genome})


def technique_counts(genomes: Sequence[Genome]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for g in genomes:
        for t in g.techniques:
            counts[t] = counts.get(t, 0) + 1
    return counts
