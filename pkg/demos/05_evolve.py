"""
One evolutionary run
====================

Evolve a small population with lexicase selection on two objectives and
watch one technique take over.
"""

from pathlib import Path

from evoart.evolve import EvolutionConfig, ObjectiveMask, run_evolution
from evoart.experiment import sweep_statistics

config = EvolutionConfig(population_size=12, generations=6, width=96, height=96,
                         eval_budget=5.0, mask=ObjectiveMask.of("ut", "ac"),
                         exclude=("flow-field",), seed=4)
out = Path("demo_output") / "run"
run = run_evolution(config, out_dir=out)

for s in sweep_statistics(out):
    lead = max(s.modal_fraction, key=s.modal_fraction.get)
    print(f"generation {s.generation}: dominance {s.dominance:.2f} ({lead})")

print("final images and CSV logs in", out)
