"""Space-filling designs on the unit hypercube."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.spatial.distance import pdist
from scipy.stats import qmc

SAMPLERS = ("lhs", "lhs_ratio", "sobol", "halton", "hammersley")

# Halton bases come from this many primes; Sobol is capped by scipy's
# Joe-Kuo direction-number table.
MAX_HALTON_DIM = 1000
MAX_SOBOL_DIM = 21201


def _first_primes(k: int) -> list[int]:
    primes: list[int] = []
    candidate = 2
    while len(primes) < k:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


def _check_shape(n: int, d: int) -> None:
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")


def latin_hypercube(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Latin hypercube design with uniform offsets inside each stratum.

    Every column holds exactly one point in each of the ``n`` equal-width
    bins of ``[0, 1)``.
    """
    _check_shape(n, d)
    bins = np.stack([rng.permutation(n) for _ in range(d)], axis=1)
    u = (bins + rng.random((n, d))) / n
    # p + r can round up to p + 1 in floating point; pull such points back
    # into their stratum.
    bad = np.floor(u * n) != bins
    u[bad] = (bins[bad] + 0.5) / n
    return u


def ratio_criterion(design: np.ndarray) -> float:
    """Minimum over maximum pairwise Euclidean distance (higher is better)."""
    design = np.asarray(design, dtype=float)
    if design.ndim != 2 or design.shape[0] < 2:
        raise ValueError("ratio criterion needs at least two points")
    dist = pdist(design)
    top = dist.max()
    if top == 0.0:
        return 0.0
    return float(dist.min() / top)


def lhs_ratio(n: int, d: int, rng: np.random.Generator, n_restarts: int = 100) -> np.ndarray:
    """Best of ``n_restarts`` Latin hypercubes under :func:`ratio_criterion`."""
    if n < 2:
        raise ValueError("lhs_ratio needs n >= 2")
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    best, best_ratio = None, -np.inf
    for _ in range(n_restarts):
        design = latin_hypercube(n, d, rng)
        ratio = ratio_criterion(design)
        if ratio > best_ratio:
            best, best_ratio = design, ratio
    return best


def radical_inverse(i: np.ndarray, base: int) -> np.ndarray:
    """Van der Corput radical inverse of the integers ``i`` in ``base``."""
    i = np.array(i, dtype=np.int64)
    out = np.zeros(i.shape)
    scale = 1.0 / base
    while np.any(i > 0):
        out += (i % base) * scale
        i //= base
        scale /= base
    return out


def low_discrepancy(kind: str, n: int, d: int, skip: int = 0) -> np.ndarray:
    """Deterministic low-discrepancy points.

    ``halton`` uses the first ``d`` primes with indices starting at 1.
    ``hammersley`` replaces the first Halton coordinate by ``i / n``.
    ``sobol`` is the unscrambled sequence starting at the origin. ``skip``
    drops that many leading points (used to continue a sequence).
    """
    _check_shape(n, d)
    if kind == "sobol":
        if d > MAX_SOBOL_DIM:
            raise ValueError(f"sobol supports d <= {MAX_SOBOL_DIM}")
        engine = qmc.Sobol(d, scramble=False)
        with warnings.catch_warnings():
            # balance-property warnings for non power-of-two n
            warnings.simplefilter("ignore", UserWarning)
            if skip:
                engine.fast_forward(skip)
            return engine.random(n)
    if kind == "halton":
        if d > MAX_HALTON_DIM:
            raise ValueError(f"halton supports d <= {MAX_HALTON_DIM}")
        idx = np.arange(skip + 1, skip + n + 1)
        return np.stack([radical_inverse(idx, b) for b in _first_primes(d)], axis=1)
    if kind == "hammersley":
        if d > MAX_HALTON_DIM + 1:
            raise ValueError(f"hammersley supports d <= {MAX_HALTON_DIM + 1}")
        first = (np.arange(n) / n)[:, None]
        if d == 1:
            return first
        return np.hstack([first, low_discrepancy("halton", n, d - 1, skip)])
    raise ValueError(f"unknown low-discrepancy kind {kind!r}")


def initial_design(
    sampler: str,
    n: int,
    d: int,
    rng: np.random.Generator,
    n_restarts: int = 100,
    skip: int = 0,
) -> np.ndarray:
    """Dispatch to one of the samplers in :data:`SAMPLERS`."""
    if sampler == "lhs":
        return latin_hypercube(n, d, rng)
    if sampler == "lhs_ratio":
        if n < 2:
            return latin_hypercube(n, d, rng)
        return lhs_ratio(n, d, rng, n_restarts)
    if sampler in ("sobol", "halton", "hammersley"):
        return low_discrepancy(sampler, n, d, skip=skip)
    raise ValueError(f"unknown sampler {sampler!r}")
