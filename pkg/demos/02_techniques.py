"""
Drawing techniques
==================

Render one gene of every technique, then a whole genome under a time
budget.  PNGs land in ``demo_output/``.
"""

import math
from pathlib import Path

import numpy as np

from evoart.canvas import Canvas
from evoart.genome import default_registry, parse
from evoart.techniques import TECHNIQUES, express, time_techniques

out = Path("demo_output")
out.mkdir(exist_ok=True)

# each technique with its default parameters
for name, draw in TECHNIQUES.items():
    canvas = Canvas(256, 256)
    draw(canvas, None, np.random.default_rng(1))
    canvas.save(out / f"{name}.png")

registry = default_registry()
genome = parse("circle-packing:2,800,3,40\n"
               "flow-field-2:5,14,60,2,77,3,0.5,0.008\n"
               "basic-trig:1,4,0.15,2.0,0.0,0.5,3", registry)
canvas, report = express(genome, (256, 256), math.inf, seed=3, registry=registry)
canvas.save(out / "genome.png")
print("expressed", report.genes_expressed, "genes")

# a tiny budget still draws the first gene
_, report = express(genome, (256, 256), 1e-6, seed=3, registry=registry)
print("with a tiny budget:", report.genes_expressed, "gene(s), truncated =", report.truncated)

# relative cost of each technique on random parameters
for row in time_techniques(registry, invocations=5, canvas_size=(200, 200)):
    print(f"{row.technique:15s} {row.mean_ms:8.1f} ms per call")
