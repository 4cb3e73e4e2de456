"""Learned search-space partition.

Points are split into a low and a high cluster by 1-D 2-means on their
objective values, a classifier learns that split on the inputs, and the
points predicted low are kept. Repeating this gives a path of classifiers
whose conjunction is the selected region.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

LOW, HIGH = 0, 1


class DegenerateSplit(ValueError):
    """Raised when values cannot be separated into two clusters."""


def kmeans2_1d(values, max_iter: int = 100) -> np.ndarray:
    """Two-means on scalars, centers initialized at min and max.

    Returns labels with ``LOW`` for the cluster with the lower mean.
    Points equidistant from both centers go to ``LOW``.
    """
    values = np.asarray(values, dtype=float).ravel()
    if len(values) < 2:
        raise DegenerateSplit("need at least two values")
    lo, hi = values.min(), values.max()
    if not lo < hi:
        raise DegenerateSplit("all values identical")
    labels = None
    for _ in range(max_iter):
        new = np.where(np.abs(values - lo) <= np.abs(values - hi), LOW, HIGH)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        lo, hi = values[labels == LOW].mean(), values[labels == HIGH].mean()
    return labels


def _kernel(kind: str, A, B, gamma: float, degree: int, coef0: float) -> np.ndarray:
    if kind == "linear":
        return A @ B.T
    if kind == "poly":
        return (gamma * (A @ B.T) + coef0) ** degree
    if kind == "rbf":
        sq = np.sum(A**2, 1)[:, None] + np.sum(B**2, 1)[None, :] - 2 * A @ B.T
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"unknown kernel {kind!r}")


def smo(K: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-3, max_iter: int = 10_000):
    """Solve the soft-margin SVM dual with second-order working-set selection.

    ``y`` holds +1/-1 labels. Returns ``(alpha, bias, n_iter)`` for the
    decision function ``sum_i alpha_i y_i K(x_i, x) + bias``.
    """
    n = len(y)
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of 0.5 a'Qa - e'a
    Q = (y[:, None] * y[None, :]) * K
    diagK = np.diag(K)
    tau = 1e-12
    it = 0
    for it in range(max_iter):
        yG = -y * G
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            break
        i = int(np.argmax(np.where(up, yG, -np.inf)))
        g_max = yG[i]
        g_min = np.min(yG[low])
        if g_max - g_min < tol:
            break
        b = g_max - yG
        quad = diagK[i] + diagK - 2 * K[i]
        quad = np.where(quad > 0, quad, tau)
        score = np.where(low & (b > 0), -(b**2) / quad, np.inf)
        j = int(np.argmin(score))

        ai, aj = alpha[i], alpha[j]
        q = max(diagK[i] + diagK[j] - 2 * K[i, j], tau)
        if y[i] != y[j]:
            delta = (-G[i] - G[j]) / q
            diff = ai - aj
            ni, nj = ai + delta, aj + delta
            if diff > 0:
                if nj < 0:
                    nj, ni = 0.0, diff
            elif ni < 0:
                ni, nj = 0.0, -diff
            if diff > 0:
                if ni > C:
                    ni, nj = C, C - diff
            elif nj > C:
                nj, ni = C, C + diff
        else:
            delta = (G[i] - G[j]) / q
            total = ai + aj
            ni, nj = ai - delta, aj + delta
            if total > C:
                if ni > C:
                    ni, nj = C, total - C
            elif nj < 0:
                nj, ni = 0.0, total
            if total > C:
                if nj > C:
                    nj, ni = C, total - C
            elif ni < 0:
                ni, nj = 0.0, total
        G += Q[:, i] * (ni - ai) + Q[:, j] * (nj - aj)
        alpha[i], alpha[j] = ni, nj

    # bias from free vectors, or the midpoint of the feasible interval
    yG = -y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        bias = float(np.mean(yG[free]))
    else:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        lo_b = np.max(yG[up]) if up.any() else -np.inf
        hi_b = np.min(yG[low]) if low.any() else np.inf
        if np.isfinite(hi_b) and np.isfinite(lo_b):
            bias = 0.5 * (hi_b + lo_b)
        else:
            bias = float(hi_b if np.isfinite(hi_b) else lo_b)
    return alpha, bias, it


@dataclass(frozen=True)
class SplitModel:
    """Binary classifier separating the low cluster from the high cluster.

    For ``svm``, ``X`` holds the support vectors and ``coef`` their
    ``alpha_i * y_i`` with ``y = +1`` meaning low. For ``knn``, ``X``
    holds the whole training set and ``labels`` its cluster labels.
    """

    kind: str
    X: np.ndarray
    labels: np.ndarray | None = None
    kernel: str = "rbf"
    C: float = 1.0
    gamma: float = 1.0
    degree: int = 3
    coef0: float = 1.0
    coef: np.ndarray | None = None
    bias: float = 0.0
    k: int = 5
    train_accuracy: float = float("nan")

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def decision(self, U) -> np.ndarray:
        """Signed margin per point; ``>= 0`` means low."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        if U.shape[1] != self.dim:
            raise ValueError(f"point dimension {U.shape[1]} != model dimension {self.dim}")
        if self.kind == "svm":
            if len(self.X) == 0:
                return np.full(len(U), self.bias)
            Kq = _kernel(self.kernel, U, self.X, self.gamma, self.degree, self.coef0)
            return Kq @ self.coef + self.bias
        return _knn_margin(self.X, self.labels, U, self.k)


def _knn_margin(X, labels, U, k, chunk: int = 256) -> np.ndarray:
    k = min(k, len(X))
    out = np.empty(len(U))
    for s in range(0, len(U), chunk):
        Q = U[s : s + chunk]
        dist = np.sum((Q[:, None, :] - X[None, :, :]) ** 2, axis=-1)
        # stable sort: equal distances resolve to the lower training index
        nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
        low_votes = np.sum(labels[nearest] == LOW, axis=1)
        out[s : s + chunk] = (2 * low_votes - k) / k
    return out


def predict_side(model: SplitModel, U) -> np.ndarray:
    """``LOW``/``HIGH`` per point; a zero margin counts as low."""
    return np.where(model.decision(U) >= 0, LOW, HIGH)


def fit_split_model(
    X,
    labels,
    kind: str = "svm",
    kernel: str = "rbf",
    C: float = 1.0,
    gamma: float | None = None,
    degree: int = 3,
    coef0: float = 1.0,
    k: int = 5,
    tol: float = 1e-3,
    max_iter: int = 10_000,
) -> SplitModel:
    """Train an SVM (via SMO) or a kNN classifier on cluster labels.

    For rbf, ``gamma`` defaults to ``1 / (d * Var(X))``; the poly kernel is
    the unscaled ``(x.x' + coef0) ** degree`` unless ``gamma`` is given.
    SVM training sees the rows in lexicographic order, so the fitted model
    does not depend on the order the points were given in.
    """
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels).astype(int)
    if len(X) < 2 or len(X) != len(labels):
        raise ValueError("need at least two labeled points")
    if len(np.unique(labels)) < 2:
        raise ValueError("split model needs both classes present")
    if kind == "knn":
        model = SplitModel("knn", X.copy(), labels.copy(), k=k)
    elif kind == "svm":
        if C <= 0:
            raise ValueError("C must be positive")
        if gamma is None and kernel != "rbf":
            gamma = 1.0
        elif gamma is None:
            var = X.var()
            gamma = 1.0 / (X.shape[1] * var) if var > 0 else 1.0
        order = np.lexsort(np.column_stack([labels, X]).T[::-1])
        Xs, ls = X[order], labels[order]
        y = np.where(ls == LOW, 1.0, -1.0)
        K = _kernel(kernel, Xs, Xs, gamma, degree, coef0)
        alpha, bias, _ = smo(K, y, C, tol=tol, max_iter=max_iter)
        sv = alpha > 0
        model = SplitModel(
            "svm", Xs[sv], ls[sv], kernel=kernel, C=C, gamma=gamma, degree=degree,
            coef0=coef0, coef=alpha[sv] * y[sv], bias=bias,
        )
    else:
        raise ValueError(f"unknown split model {kind!r}")
    acc = float(np.mean(predict_side(model, X) == labels))
    return replace(model, train_accuracy=acc)


@dataclass(frozen=True)
class PartitionPath:
    splits: tuple[SplitModel, ...] = ()
    leaf_points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    # survivors[k] = indices kept after the first k + 1 splits
    survivors: tuple[np.ndarray, ...] = ()

    @property
    def depth(self) -> int:
        return len(self.splits)


def region_margin(path: PartitionPath, U) -> np.ndarray:
    """Smallest split margin along the path; ``>= 0`` means inside the region."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    margin = np.full(len(U), np.inf)
    for split in path.splits:
        margin = np.minimum(margin, split.decision(U))
    return margin


def in_region(path: PartitionPath, U) -> np.ndarray:
    """Boolean mask: every split on the path predicts low."""
    return region_margin(path, U) >= 0


def build_partition(
    X,
    y,
    kind: str = "svm",
    kernel: str = "rbf",
    C: float = 1.0,
    max_depth: int = 5,
    min_leaf: int = 8,
    k: int = 5,
) -> PartitionPath:
    """Descend the low side of recursive 2-means splits.

    Stops at ``max_depth`` splits, when the kept subset would have fewer
    than ``min_leaf`` points, when the values no longer split, or when the
    classifier puts every current point on one side. Fewer than
    ``min_leaf`` points to begin with yields an empty path.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    idx = np.arange(len(X))
    splits: list[SplitModel] = []
    survivors: list[np.ndarray] = []
    if len(X) < min_leaf:
        return PartitionPath((), idx, ())
    while len(splits) < max_depth:
        try:
            labels = kmeans2_1d(y[idx])
        except DegenerateSplit:
            break
        model = fit_split_model(X[idx], labels, kind=kind, kernel=kernel, C=C, k=k)
        side = predict_side(model, X[idx])
        if np.all(side == LOW) or np.all(side == HIGH):
            break
        kept = idx[side == LOW]
        if len(kept) < min_leaf:
            break
        splits.append(model)
        survivors.append(kept)
        idx = kept
    return PartitionPath(tuple(splits), idx, tuple(survivors))
