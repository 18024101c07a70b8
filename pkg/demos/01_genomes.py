"""
Genomes: sampling, text form and variation
==========================================

A genome is a list of drawing-technique genes.  Each gene names a
technique and carries one value per parameter of that technique.
"""

import numpy as np

from evoart.genome import crossover, default_registry, mutate, parse, random_genome, serialize

registry = default_registry()
rng = np.random.default_rng(0)

# sample two parents of 1..5 genes
a = random_genome(registry, rng)
b = random_genome(registry, rng)
print(serialize(a), end="\n\n")

# the text form parses back to the same genome
assert parse(serialize(a), registry) == a

# single-point crossover: a prefix of one parent, a suffix of the other
child = crossover(a, b, rng, rate=1.0)
print("child has", len(child), "genes:", child.techniques)

# mutation replaces a gene, resamples its parameters, or shuffles the order
print("mutated:", mutate(child, registry, rng, rate=1.0).techniques)

# bad text raises an error naming the line
try:
    parse("basic-trig:1,2,3\n", registry)
except ValueError as exc:
    print("rejected:", exc)
