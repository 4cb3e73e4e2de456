#!/usr/bin/env python3
# coding: utf-8

# # Parameter spaces and initial designs
#
# All of the optimizer's internal math happens in the unit cube. A
# `SpaceDefinition` describes the typed parameters and how each one is warped
# into `[0, 1]`: reals and integers can be linear, log, logit or bi-log scaled,
# categoricals become one-hot blocks and booleans a single 0/1 coordinate.

import numpy as np

from spbopt import ParamSpec, unwarp, validate_space, warp
from spbopt.sampling import initial_design, latin_hypercube, lhs_ratio, ratio_criterion

space = validate_space([
    ParamSpec("lr", "real", "log", 1e-5, 1e-1),
    ParamSpec("dropout", "real", "logit", 0.01, 0.9),
    ParamSpec("layers", "integer", "linear", 1, 8),
    ParamSpec("act", "categorical", categories=("relu", "tanh", "gelu")),
    ParamSpec("bias", "boolean"),
])
print("encoded dimension:", space.encoded_dim)

# A point goes into the cube and back out unchanged.

x = {"lr": 1e-3, "dropout": 0.2, "layers": 3, "act": "gelu", "bias": True}
u = warp(x, space)
print("u =", np.round(u, 4))
print("round trip:", unwarp(u, space))

# Any cube point decodes to something valid: integers round, the one-hot
# block is decoded by argmax, booleans threshold at one half.

rng = np.random.default_rng(0)
print("random decode:", unwarp(rng.random(space.encoded_dim), space))

# ## Initial designs
#
# A Latin hypercube puts exactly one point in each of the `n` strata of every
# coordinate. `lhs_ratio` draws many of them and keeps the one with the best
# min/max pairwise distance ratio.

n, d = 24, space.encoded_dim
plain = latin_hypercube(n, d, np.random.default_rng(1))
best = lhs_ratio(n, d, np.random.default_rng(1), n_restarts=100)
print(f"ratio criterion: single LHS {ratio_criterion(plain):.3f}, best of 100 {ratio_criterion(best):.3f}")

for kind in ("sobol", "halton", "hammersley"):
    D = initial_design(kind, n, d, rng)
    print(f"{kind:>10}: ratio {ratio_criterion(D):.3f}")
