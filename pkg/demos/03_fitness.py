"""
Fitness objectives
==================

Six objectives score each rendered individual.  Pixel and Chebyshev
differences compare it with the rest of the population, the others look
at the genome or the image alone.
"""

import math

import numpy as np

from evoart.classifier import synthetic_model
from evoart.fitness import evaluate_population
from evoart.genome import default_registry, random_genome

registry = default_registry(exclude=["flow-field"])
rng = np.random.default_rng(5)
genomes = [random_genome(registry, rng) for _ in range(6)]

# the art score comes from a centroid model; here one trained on synthetic images
model = synthetic_model()
population = evaluate_population(genomes, math.inf, model, registry, seed=0, canvas_size=(96, 96))

print("  pc      gc   ut    cd      ns    ac")
for ind in population:
    f = ind.fitness
    print(f"{f.pc:6.1f} {f.gc:4.0f} {f.ut:5.2f} {f.cd:6.1f} {f.ns:6.3f} {f.ac:5.3f}")
