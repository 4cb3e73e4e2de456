#!/usr/bin/env python3
# coding: utf-8

# # The Gaussian process surrogate
#
# The local model is a GP with a Matern-5/2 kernel and one lengthscale per
# dimension. Hyper-parameters are fit by maximizing the log marginal
# likelihood with L-BFGS-B from a default start plus a few random restarts.

import numpy as np

from spbopt.surrogate import fit_gp, posterior, predict, sample_posterior

rng = np.random.default_rng(0)


def f(X):
    # varies quickly along the first axis, slowly along the second
    return np.sin(8 * X[:, 0]) + 0.3 * X[:, 1]


X = rng.random((30, 2))
gp = fit_gp(X, f(X), rng=rng)
print("lengthscales:", np.round(gp.lengthscales, 3))
print(f"signal variance {gp.signal_var:.3f}, noise variance {gp.noise_var:.2e}")

# The fitted lengthscale along the fast axis is much shorter. The trust
# region uses exactly this ratio to shape its box.

Xq = rng.random((5, 2))
mean, var = predict(gp, Xq)
for xq, m, v, t in zip(Xq, mean, var, f(Xq)):
    print(f"x={np.round(xq, 2)}  mean {m:+.3f} +- {2 * np.sqrt(v):.3f}  truth {t:+.3f}")

# Joint posterior draws power batch Thompson sampling: every draw is a
# plausible function, and its argmin is a plausible minimizer.

grid = np.column_stack([np.linspace(0, 1, 200), np.full(200, 0.5)])
draws = sample_posterior(gp, grid, 8, rng)
print("argmins of 8 draws along x0:", np.round(grid[draws.argmin(axis=1), 0], 3))

_, cov = posterior(gp, grid)
print("smallest eigenvalue of the posterior covariance:", f"{np.linalg.eigvalsh(cov).min():.2e}")
