#!/usr/bin/env python3
# coding: utf-8

# # Learning a search-space partition
#
# Evaluated points are split into a low-value and a high-value cluster with
# 1-D k-means on their objective values. A classifier (an SVM trained by SMO,
# or kNN) learns that split in the unit cube. The low side is split again,
# recursively, until the leaf gets too small, the depth limit is reached, or
# the split stops separating anything. The conjunction of "low side" answers
# defines the region the local optimizer searches.

import numpy as np

from spbopt.partition import build_partition, in_region, kmeans2_1d

rng = np.random.default_rng(3)
X = rng.random((64, 2))
y = np.linalg.norm(X - [0.7, 0.3], axis=1)

labels = kmeans2_1d(y)
print("first split: low cluster", (labels == 0).sum(), "points, high cluster", (labels == 1).sum())

path = build_partition(X, y, kind="svm", kernel="poly", C=745.322745)
print("depth:", path.depth)
for level, kept in enumerate(path.survivors, start=1):
    print(f"  level {level}: {len(kept)} points, mean y {y[kept].mean():.3f}")
print("overall mean y:", round(y.mean(), 3))

# How much of the cube does the selected region cover, and where is it?

U = rng.random((20_000, 2))
inside = in_region(path, U)
print(f"region covers {inside.mean():.1%} of the cube; its centroid is {np.round(U[inside].mean(axis=0), 2)}")

# Text rendering of the region on a coarse grid (# = inside).

g = (np.arange(24) + 0.5) / 24
for row in g[::-1]:
    print("".join("#" if in_region(path, np.array([[c, row]]))[0] else "." for c in g))
