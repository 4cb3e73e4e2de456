"""Single trust-region local Bayesian optimization with late-budget decay."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .sampling import latin_hypercube
from .surrogate import GpModel, sample_posterior

LENGTH_INIT = 0.8
LENGTH_MIN = 0.5**7
LENGTH_MAX = 1.6
SUCC_TOL = 3
FAIL_TOL = 4


@dataclass(frozen=True)
class TrustRegion:
    center: np.ndarray
    length: float = LENGTH_INIT
    succ_count: int = 0
    fail_count: int = 0
    weights: np.ndarray | None = None
    length_min: float = LENGTH_MIN
    length_max: float = LENGTH_MAX
    succ_tol: int = SUCC_TOL
    fail_tol: int = FAIL_TOL
    last_event: str | None = None  # "expand", "shrink" or None for the last update

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def lengths(self) -> np.ndarray:
        w = np.ones(self.dim) if self.weights is None else self.weights
        return self.length * w

    @property
    def collapsed(self) -> bool:
        return self.length < self.length_min

    def box(self) -> tuple[np.ndarray, np.ndarray]:
        half = self.lengths / 2
        return np.clip(self.center - half, 0.0, 1.0), np.clip(self.center + half, 0.0, 1.0)


def init_trust_region(d: int, incumbent, length_init: float = LENGTH_INIT) -> TrustRegion:
    incumbent = np.asarray(incumbent, dtype=float)
    if d < 1 or incumbent.shape != (d,):
        raise ValueError(f"incumbent must be a vector of length {d}")
    return TrustRegion(center=incumbent.copy(), length=length_init)


def lengthscale_weights(lengthscales) -> np.ndarray:
    """Lengthscales rescaled to geometric mean one."""
    w = np.asarray(lengthscales, dtype=float)
    w = w / w.mean()
    return w / np.exp(np.mean(np.log(w)))


RegionFn = Callable[[np.ndarray], np.ndarray]


def _margins(region: RegionFn | None, U: np.ndarray) -> np.ndarray:
    if region is None:
        return np.zeros(len(U))
    m = np.asarray(region(U))
    if m.dtype == bool:
        return np.where(m, 0.0, -1.0)
    return m.astype(float)


def candidate_set(tr: TrustRegion, n_cand: int, rng: np.random.Generator, prob_perturb=None):
    """Perturb random coordinates of the center with stratified draws from the box."""
    d = tr.dim
    lb, ub = tr.box()
    pert = lb + (ub - lb) * latin_hypercube(n_cand, d, rng)
    prob = min(1.0, 20.0 / d) if prob_perturb is None else prob_perturb
    mask = rng.random((n_cand, d)) <= prob
    empty = np.flatnonzero(~mask.any(axis=1))
    mask[empty, rng.integers(0, d, size=len(empty))] = True
    cand = np.tile(tr.center, (n_cand, 1))
    cand[mask] = pert[mask]
    return cand


def propose_batch(
    tr: TrustRegion,
    gp: GpModel | None,
    region: RegionFn | None,
    B: int,
    rng: np.random.Generator,
    n_cand: int | None = None,
    prob_perturb: float | None = None,
) -> np.ndarray:
    """Thompson-sample ``B`` points from region-filtered trust-region candidates.

    ``region`` maps candidate rows to margins (``>= 0`` is inside) or to a
    boolean mask. If fewer than ``B`` candidates survive the filter, the
    rejected ones closest to the region boundary are added back. Each
    posterior draw contributes its argmin; repeats fall through to that
    draw's next-best candidate.
    """
    if gp is None:
        raise ValueError("trust region needs a fitted GP")
    if B < 1:
        raise ValueError("B must be >= 1")
    tr = replace(tr, weights=lengthscale_weights(gp.lengthscales))
    d = tr.dim
    if n_cand is None:
        n_cand = min(100 * d, 5000)
    n_cand = max(n_cand, B)
    cand = candidate_set(tr, n_cand, rng, prob_perturb)

    margin = _margins(region, cand)
    inside = margin >= 0
    keep = np.flatnonzero(inside)
    if len(keep) < B:
        rejected = np.flatnonzero(~inside)
        closest = rejected[np.argsort(-margin[rejected], kind="stable")]
        keep = np.sort(np.concatenate([keep, closest[: B - len(keep)]]))
    pool = cand[keep]

    draws = sample_posterior(gp, pool, B, rng)
    chosen: list[int] = []
    taken = np.zeros(len(pool), dtype=bool)
    for draw in draws:
        for idx in np.argsort(draw, kind="stable"):
            if not taken[idx]:
                taken[idx] = True
                chosen.append(int(idx))
                break
    return pool[chosen]


def update_trust_region(
    tr: TrustRegion,
    batch_min: float,
    incumbent_y: float,
    t: int,
    K: int,
    decay: float,
    new_center=None,
) -> TrustRegion:
    """Success/failure bookkeeping, then the late-budget decay.

    A batch succeeds when it beats the incumbent by a relative 1e-3.
    Completing a success streak doubles the base length (capped at
    ``length_max``), completing a failure streak halves it. Afterwards,
    for ``t > K / 2`` the base length is multiplied by ``decay``.
    """
    if np.isfinite(incumbent_y):
        success = batch_min < incumbent_y - 1e-3 * abs(incumbent_y)
    else:
        success = np.isfinite(batch_min)
    succ, fail = (tr.succ_count + 1, 0) if success else (0, tr.fail_count + 1)
    length, event = tr.length, None
    if succ == tr.succ_tol:
        length, succ, event = min(2.0 * length, tr.length_max), 0, "expand"
    elif fail == tr.fail_tol:
        length, fail, event = length / 2.0, 0, "shrink"
    if t > K / 2:
        length *= decay
    center = tr.center if new_center is None else np.asarray(new_center, dtype=float).copy()
    return replace(
        tr, center=center, length=length, succ_count=succ, fail_count=fail, last_event=event
    )
