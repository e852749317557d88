"""
Reproducible experiment records
===============================

Every command is a pure function of its configuration.  The CSV output
embeds the canonical configuration, so a saved file can be rerun exactly.
"""
from secgraph.experiments import ExperimentConfig, run

cfg = ExperimentConfig("edges", {"lam": 0.25, "r": float("inf"), "L": 30.0, "runs": 2, "seed": 7, "bins": 5})
text = run(cfg).render()
print(text)

header = text.splitlines()[0][len("# config: "):]
again = run(ExperimentConfig.parse(header)).render()
print("byte-identical rerun:", again == text)

# the same experiment from the shell:
#   secgraph edges --lambda 0.25 --r inf --L 30 --runs 2 --seed 7 --bins 5
