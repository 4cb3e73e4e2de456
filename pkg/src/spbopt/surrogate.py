"""Gaussian-process regression with an ARD Matern-5/2 kernel.

Hyper-parameters live in log space as one vector
``[log l_1, ..., log l_d, log signal_var, log noise_var]``.
Targets are standardized before fitting; :func:`posterior` returns
predictions in the original units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

SQRT5 = np.sqrt(5.0)

LENGTHSCALE_BOUNDS = (0.005, 2.0)
SIGNAL_VAR_BOUNDS = (0.05, 20.0)
NOISE_VAR_BOUNDS = (1e-6, 0.1)

JITTERS = (0.0,) + tuple(10.0**k for k in range(-10, -3))


class GPFitError(RuntimeError):
    pass


def matern52(A: np.ndarray, B: np.ndarray, lengthscales, signal_var: float) -> np.ndarray:
    diff = (A[:, None, :] - B[None, :, :]) / lengthscales
    r = np.sqrt(np.sum(diff**2, axis=-1))
    return signal_var * (1.0 + SQRT5 * r + 5.0 / 3.0 * r**2) * np.exp(-SQRT5 * r)


def _unpack(params: np.ndarray, d: int):
    params = np.asarray(params, dtype=float)
    return np.exp(params[:d]), np.exp(params[d]), np.exp(params[d + 1])


def log_bounds(d: int) -> list[tuple[float, float]]:
    return (
        [tuple(np.log(LENGTHSCALE_BOUNDS))] * d
        + [tuple(np.log(SIGNAL_VAR_BOUNDS)), tuple(np.log(NOISE_VAR_BOUNDS))]
    )


def log_marginal_likelihood(params, X, y, jitter: float = 0.0) -> tuple[float, np.ndarray]:
    """Log marginal likelihood and its gradient w.r.t. the log hyper-parameters.

    A failed Cholesky factorization propagates as ``LinAlgError``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    ls, sf2, sn2 = _unpack(params, d)

    diff2 = ((X[:, None, :] - X[None, :, :]) / ls) ** 2  # n x n x d
    r = np.sqrt(diff2.sum(axis=-1))
    e = np.exp(-SQRT5 * r)
    Kf = sf2 * (1.0 + SQRT5 * r + 5.0 / 3.0 * r**2) * e
    K = Kf + (sn2 + jitter) * np.eye(n)

    L = cholesky(K, lower=True)
    alpha = cho_solve((L, True), y)
    value = -0.5 * y @ alpha - np.log(np.diag(L)).sum() - 0.5 * n * np.log(2 * np.pi)

    # dL/dtheta = 0.5 * tr((alpha alpha^T - K^-1) dK/dtheta)
    W = np.outer(alpha, alpha) - cho_solve((L, True), np.eye(n))
    dk_dlogl = sf2 * (5.0 / 3.0) * (1.0 + SQRT5 * r) * e  # times diff2[..., j]
    grad = np.empty(d + 2)
    grad[:d] = 0.5 * np.einsum("ij,ij,ijk->k", W, dk_dlogl, diff2)
    grad[d] = 0.5 * np.sum(W * Kf)
    grad[d + 1] = 0.5 * sn2 * np.trace(W)
    return float(value), grad


@dataclass(frozen=True)
class GpModel:
    X: np.ndarray
    y_std: np.ndarray
    y_mean: float
    y_scale: float
    lengthscales: np.ndarray
    signal_var: float
    noise_var: float
    chol: np.ndarray
    alpha: np.ndarray

    @property
    def params(self) -> np.ndarray:
        return np.concatenate(
            [np.log(self.lengthscales), [np.log(self.signal_var), np.log(self.noise_var)]]
        )

    @property
    def dim(self) -> int:
        return self.X.shape[1]


def _factorize(X, y_std, ls, sf2, sn2):
    n = len(X)
    K = matern52(X, X, ls, sf2) + sn2 * np.eye(n)
    for jitter in JITTERS:
        try:
            L = cholesky(K + jitter * np.eye(n), lower=True)
        except LinAlgError:
            continue
        return L, cho_solve((L, True), y_std)
    raise GPFitError("kernel matrix not positive definite after maximum jitter")


def condition(X, y, lengthscales, signal_var: float, noise_var: float) -> GpModel:
    """GP with fixed hyper-parameters conditioned on ``(X, y)``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    y_mean = float(y.mean())
    y_scale = float(y.std()) or 1.0
    y_std = (y - y_mean) / y_scale
    ls = np.broadcast_to(np.asarray(lengthscales, dtype=float), (X.shape[1],)).copy()
    L, alpha = _factorize(X, y_std, ls, signal_var, noise_var)
    return GpModel(X, y_std, y_mean, y_scale, ls, float(signal_var), float(noise_var), L, alpha)


def fit_gp(
    X,
    y,
    rng: np.random.Generator | None = None,
    n_restarts: int = 3,
    max_iter: int = 50,
    init_params=None,
) -> GpModel:
    """Fit a GP by maximizing the marginal likelihood (ML-II).

    Runs L-BFGS-B from a default start, ``n_restarts`` random starts drawn
    uniformly in the log bounds, and ``init_params`` (e.g. a previous fit)
    when given. Constant targets skip the optimization and pin the signal
    variance at its lower bound.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be n x d with n matching len(y)")
    n, d = X.shape
    if n < 2:
        raise ValueError("fit_gp needs at least two points")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite training data")

    y_mean = float(y.mean())
    y_scale = float(y.std())
    if y_scale == 0.0:
        return condition(X, y, 0.5, SIGNAL_VAR_BOUNDS[0], NOISE_VAR_BOUNDS[0])
    y_std = (y - y_mean) / y_scale

    bounds = log_bounds(d)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    starts = [np.concatenate([np.full(d, np.log(0.5)), [0.0, np.log(1e-3)]])]
    if init_params is not None:
        starts.append(np.clip(np.asarray(init_params, dtype=float), lo, hi))
    if rng is None:
        rng = np.random.default_rng(0)
    starts.extend(rng.uniform(lo, hi) for _ in range(n_restarts))

    def objective(theta):
        for jitter in JITTERS:
            try:
                value, grad = log_marginal_likelihood(theta, X, y_std, jitter)
            except LinAlgError:
                continue
            return -value, -grad
        return 1e25, np.zeros_like(theta)

    best_theta, best_value = None, np.inf
    for theta0 in starts:
        res = minimize(
            objective, theta0, jac=True, method="L-BFGS-B", bounds=bounds,
            options={"maxiter": max_iter},
        )
        if np.isfinite(res.fun) and res.fun < best_value:
            best_theta, best_value = res.x, res.fun
    if best_theta is None:
        raise GPFitError("marginal likelihood optimization failed from every start")

    ls, sf2, sn2 = _unpack(best_theta, d)
    return condition(X, y, ls, sf2, sn2)


def _check_query(gp: GpModel, Xq) -> np.ndarray:
    Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
    if Xq.shape[1] != gp.dim:
        raise ValueError(f"query dimension {Xq.shape[1]} != model dimension {gp.dim}")
    return Xq


def predict(gp: GpModel, Xq) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and marginal variance (original units)."""
    Xq = _check_query(gp, Xq)
    Ks = matern52(Xq, gp.X, gp.lengthscales, gp.signal_var)
    mean = Ks @ gp.alpha
    v = solve_triangular(gp.chol, Ks.T, lower=True)
    var = np.maximum(gp.signal_var - np.sum(v**2, axis=0), 0.0)
    return gp.y_mean + gp.y_scale * mean, gp.y_scale**2 * var


def _joint(gp: GpModel, Xq) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mean plus eigendecomposition of the clamped, symmetrized covariance."""
    Xq = _check_query(gp, Xq)
    Ks = matern52(Xq, gp.X, gp.lengthscales, gp.signal_var)
    mean = gp.y_mean + gp.y_scale * (Ks @ gp.alpha)
    v = solve_triangular(gp.chol, Ks.T, lower=True)
    cov = matern52(Xq, Xq, gp.lengthscales, gp.signal_var) - v.T @ v
    cov = 0.5 * (cov + cov.T) * gp.y_scale**2
    w, V = np.linalg.eigh(cov)
    return mean, np.maximum(w, 0.0), V


def posterior(gp: GpModel, Xq) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and full covariance of the latent function (original units).

    The covariance is symmetrized and its eigenvalues clamped at zero.
    """
    mean, w, V = _joint(gp, Xq)
    cov = (V * w) @ V.T
    return mean, 0.5 * (cov + cov.T)


def sample_posterior(gp: GpModel, Xq, s: int, rng: np.random.Generator) -> np.ndarray:
    """``s`` joint posterior draws at the rows of ``Xq``, shape ``(s, m)``."""
    if s < 1:
        raise ValueError("need at least one sample")
    mean, w, V = _joint(gp, Xq)
    z = rng.standard_normal((len(mean), s))
    return (mean[:, None] + (V * np.sqrt(w)) @ z).T
