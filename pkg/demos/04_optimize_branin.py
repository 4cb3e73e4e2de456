#!/usr/bin/env python3
# coding: utf-8

# # Optimizing Branin with suggest/observe
#
# The optimizer is driven by alternating `suggest()` (a batch of points in
# the original space) and `observe()` (their values). Here: 16 rounds of 8
# points on the Branin function with the `spbopt2` preset.

from spbopt import SPBOpt, preset
from spbopt.bench import get_objective

branin = get_objective("branin")
opt = SPBOpt(branin.space, preset("spbopt2", seed=0))

for _ in range(16):
    xs = opt.suggest()
    opt.observe(xs, [branin(x) for x in xs])
    t = opt.t
    print(f"t={t:2d}  phase={opt.phase:<12}  best={opt.best_y_history[-1]:.5f}")

print("best point:", opt.best.x, "value", round(opt.best.y, 6), "known minimum", round(branin.f_min, 6))

# The optimizer keeps a log of its schedule: partition rebuilds every four
# iterations after the initial design, and the trust-region length, which
# decays once half of the budget is spent.

for e in opt.events:
    print(e)
for r in opt.trust_trace:
    print(f"t={r['t']:2d}  length {r['length_before']:.4f} -> {r['length_after']:.4f}  {r['event'] or ''}")
