#!/usr/bin/env python3
# coding: utf-8

# # A small benchmark
#
# Each run is scored as `100 * (f_max - f_best) / (f_max - f_min)`, so 100
# means the known minimum was found. Paired runs (same objective, same seed)
# are compared with a one-sided Wilcoxon signed-rank test. The full
# comparison is `bbo-bench run --out results`; this script runs a reduced
# version in-process.

from spbopt.bench import aggregate, get_objective, method_factory, run_experiment

objectives = ["branin", "levy", "sphere_cat"]
methods = ["spbopt2", "turbo_lite", "random"]
records = [
    run_experiment(get_objective(o), method_factory(m), K=16, B=8, seed=s, method_name=m)
    for m in methods
    for o in objectives
    for s in range(2)
]
for r in records:
    print(f"{r.method:<11} {r.objective:<11} seed {r.seed}  score {r.score:8.3f}")
print()
print(aggregate(records, [("spbopt2", "random"), ("spbopt2", "turbo_lite")]).table())
