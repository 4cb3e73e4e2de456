"""Normalized scores, the Wilcoxon signed-rank test, and score aggregation."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import norm, rankdata

EXACT_MAX_PAIRS = 25


def score(f_a: float, f_min: float, f_max: float) -> float:
    """``100 * (f_max - f_a) / (f_max - f_min)``, unclipped."""
    if not f_min < f_max:
        raise ValueError(f"need f_min < f_max, got {f_min}, {f_max}")
    if not math.isfinite(f_a):
        raise ValueError("f_a must be finite")
    return 100.0 * (f_max - f_a) / (f_max - f_min)


def _exact_tails(ranks2: np.ndarray, w2: int) -> tuple[float, float]:
    """P(W+ >= w) and P(W+ <= w) under random signs; ranks are doubled ints."""
    total = int(ranks2.sum())
    counts = np.zeros(total + 1, dtype=object)
    counts[0] = 1
    for r in ranks2:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    n_assign = 2 ** len(ranks2)
    upper = sum(counts[w2:]) / n_assign
    lower = sum(counts[: w2 + 1]) / n_assign
    return float(upper), float(lower)


def wilcoxon_signed_rank(
    x: Sequence[float],
    y: Sequence[float] | None = None,
    alternative: str = "two-sided",
) -> tuple[float, float]:
    """Signed-rank test on paired differences ``x - y``.

    Zero differences are dropped; with none left the p-value is 1. Up to
    :data:`EXACT_MAX_PAIRS` pairs the p-value comes from the exact null
    distribution of the positive-rank sum (midranks included); above that
    from the tie-corrected normal approximation. ``alternative="greater"``
    tests whether ``x`` tends to exceed ``y``.

    Returns ``(W+, p)``.
    """
    d = np.asarray(x, dtype=float)
    if y is not None:
        y = np.asarray(y, dtype=float)
        if y.shape != d.shape:
            raise ValueError("paired samples must have equal length")
        d = d - y
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return 0.0, 1.0
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())

    if n <= EXACT_MAX_PAIRS:
        ranks2 = np.rint(2 * ranks).astype(int)
        upper, lower = _exact_tails(ranks2, int(round(2 * w_plus)))
    else:
        _, tie_counts = np.unique(ranks, return_counts=True)
        mean = n * (n + 1) / 4
        var = n * (n + 1) * (2 * n + 1) / 24 - np.sum(tie_counts**3 - tie_counts) / 48
        z = (w_plus - mean) / math.sqrt(var)
        upper, lower = float(norm.sf(z)), float(norm.cdf(z))
    if alternative == "greater":
        return w_plus, upper
    if alternative == "less":
        return w_plus, lower
    return w_plus, min(1.0, 2 * min(upper, lower))


@dataclass
class ScoreReport:
    # (method, objective) -> scores ordered by seed
    scores: dict[tuple[str, str], list[float]]
    mean: dict[str, float]
    std: dict[str, float]
    # (a, b) -> one-sided p-value for "a scores higher than b"
    pvalues: dict[tuple[str, str], float] = field(default_factory=dict)

    @property
    def methods(self) -> list[str]:
        return sorted(self.mean)

    def table(self) -> str:
        lines = [f"{'method':<16}{'mean':>10}{'stddev':>10}"]
        for m in sorted(self.mean, key=lambda m: self.mean[m]):
            lines.append(f"{m:<16}{self.mean[m]:>10.3f}{self.std[m]:>10.3f}")
        if self.pvalues:
            lines.append("")
            lines.append("one-sided Wilcoxon p (row scores higher than column)")
            for (a, b), p in sorted(self.pvalues.items()):
                lines.append(f"  {a} > {b}: p = {p:.4g}")
        return "\n".join(lines)


def paired_scores(records, a: str, b: str) -> tuple[np.ndarray, np.ndarray]:
    """Scores of ``a`` and ``b`` aligned on ``(objective, seed)``."""
    sa = {(r.objective, r.seed): r.score for r in records if r.method == a}
    sb = {(r.objective, r.seed): r.score for r in records if r.method == b}
    if set(sa) != set(sb):
        raise ValueError(f"methods {a!r} and {b!r} are not paired on the same (objective, seed) runs")
    keys = sorted(sa)
    return np.array([sa[k] for k in keys]), np.array([sb[k] for k in keys])


def aggregate(records: Iterable, comparisons: Iterable[tuple[str, str]] | None = None) -> ScoreReport:
    """Per-method mean and sample standard deviation plus paired Wilcoxon p-values.

    ``comparisons`` defaults to every ordered pair of methods.
    """
    records = sorted(records, key=lambda r: (r.method, r.objective, r.seed))
    if not records:
        raise ValueError("no records to aggregate")
    scores: dict[tuple[str, str], list[float]] = {}
    per_method: dict[str, list[float]] = {}
    for r in records:
        scores.setdefault((r.method, r.objective), []).append(r.score)
        per_method.setdefault(r.method, []).append(r.score)
    mean = {m: float(np.mean(v)) for m, v in per_method.items()}
    std = {m: float(np.std(v, ddof=1)) if len(v) > 1 else float("nan") for m, v in per_method.items()}
    if comparisons is None:
        comparisons = itertools.permutations(sorted(per_method), 2)
    pvalues = {}
    for a, b in comparisons:
        xa, xb = paired_scores(records, a, b)
        pvalues[(a, b)] = wilcoxon_signed_rank(xa, xb, alternative="greater")[1]
    return ScoreReport(scores, mean, std, pvalues)
