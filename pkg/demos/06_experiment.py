"""
Leave-x-out ablation
====================

Run every cell of a small mask x replicate grid, normalise the mean
objective values into a heatmap table and tile one final population into
a collage.
"""

from pathlib import Path

from evoart.evolve import EvolutionConfig
from evoart.experiment import ExperimentPlan, aggregate, cell_dir, masks_from_text, run_experiment
from evoart.report import collage

base = EvolutionConfig(population_size=8, generations=3, width=64, height=64,
                       eval_budget=5.0, exclude=("flow-field",), seed=1)
masks = masks_from_text("gc;ns;gc,ns")
root = Path("demo_output") / "ablation"

# finished cells are skipped when this is rerun
results = run_experiment(ExperimentPlan(base, masks, replicates=2), root)
print(len(results.completed), "cells run,", len(results.skipped), "skipped")

table = aggregate(root, root / "heatmap.csv")
for config, row in sorted(table.items()):
    print(config, " ".join(f"{k}={v:.2f}" for k, v in row.items()))

size = collage(cell_dir(root, masks[1], 0), 4, (64, 64), root / "collage.png")
print("collage", size)
