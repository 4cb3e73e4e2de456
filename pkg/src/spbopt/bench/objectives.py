"""Synthetic objective suite with normalization bounds.

The suite covers 2 to 6 dimensions, every warp except logit, and integer
and categorical parameters. ``f_min`` is the analytic global minimum;
``f_max`` is the 97.5th percentile of 16384 scrambled-Sobol samples
(see :func:`estimate_bounds`), frozen in :data:`STORED_F_MAX`.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, replace
from typing import Any, Callable, Mapping

import numpy as np
from scipy.stats import qmc

from ..space import ParamSpec, SpaceDefinition, unwarp, validate_space

BOUNDS_VERSION = 1
BOUNDS_SAMPLES = 2**14
BOUNDS_SEED = 0


@dataclass(frozen=True)
class Objective:
    name: str
    space: SpaceDefinition
    func: Callable[[Mapping[str, Any]], float]
    f_min: float
    f_max: float
    noise_sd: float = 0.0

    def __call__(self, x: Mapping[str, Any], rng: np.random.Generator | None = None) -> float:
        y = float(self.func(x))
        if self.noise_sd > 0:
            if rng is None:
                raise ValueError(f"{self.name}: noisy objective needs an rng")
            y += self.noise_sd * rng.standard_normal()
        return y

    def noise_rng(self, seed: int) -> np.random.Generator:
        return np.random.default_rng([seed, zlib.crc32(self.name.encode())])

    def with_noise(self, fraction: float = 0.01) -> "Objective":
        return replace(self, name=f"{self.name}_noisy", noise_sd=fraction * (self.f_max - self.f_min))


def _vec(x: Mapping[str, Any], names: list[str]) -> np.ndarray:
    return np.array([float(x[n]) for n in names])


def branin(x1, x2):
    b, c, t = 5.1 / (4 * np.pi**2), 5 / np.pi, 1 / (8 * np.pi)
    return (x2 - b * x1**2 + c * x1 - 6) ** 2 + 10 * (1 - t) * np.cos(x1) + 10


def rosenbrock(z):
    return float(np.sum(100 * (z[1:] - z[:-1] ** 2) ** 2 + (1 - z[:-1]) ** 2))


def levy(z):
    w = 1 + (z - 1) / 4
    head = np.sin(np.pi * w[0]) ** 2
    mid = np.sum((w[:-1] - 1) ** 2 * (1 + 10 * np.sin(np.pi * w[:-1] + 1) ** 2))
    tail = (w[-1] - 1) ** 2 * (1 + np.sin(2 * np.pi * w[-1]) ** 2)
    return float(head + mid + tail)


def ackley(z):
    d = len(z)
    return float(
        -20 * np.exp(-0.2 * np.sqrt(np.sum(z**2) / d))
        - np.exp(np.sum(np.cos(2 * np.pi * z)) / d)
        + 20
        + np.e
    )


_H6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_H6_A = np.array([
    [10, 3, 17, 3.5, 1.7, 8],
    [0.05, 10, 17, 0.1, 8, 14],
    [3, 3.5, 1.7, 10, 17, 8],
    [17, 8, 0.05, 10, 0.1, 14],
])
_H6_P = 1e-4 * np.array([
    [1312, 1696, 5569, 124, 8283, 5886],
    [2329, 4135, 8307, 3736, 1004, 9991],
    [2348, 1451, 3522, 2883, 3047, 6650],
    [4047, 8828, 8732, 5743, 1091, 381],
])


def hartmann6(z):
    inner = np.sum(_H6_A * (z - _H6_P) ** 2, axis=1)
    return float(-np.sum(_H6_ALPHA * np.exp(-inner)))


CATEGORY_OFFSETS = {"a": 0.0, "b": 1.0, "c": 3.0}


def _reals(prefix: str, d: int, lo: float, hi: float, warp: str = "linear") -> list[ParamSpec]:
    return [ParamSpec(f"{prefix}{i}", "real", warp, lo, hi) for i in range(1, d + 1)]


def _definitions():
    """(name, space, func, analytic f_min) for every suite member."""
    defs = []

    space = validate_space([ParamSpec("x1", "real", "linear", -5, 10), ParamSpec("x2", "real", "linear", 0, 15)])
    defs.append(("branin", space, lambda x: float(branin(x["x1"], x["x2"])), 0.39788735772973816))

    space = validate_space(_reals("x", 3, -5, 10, "bilog"))
    names = space.names
    defs.append(("rosenbrock", space, lambda x, n=names: rosenbrock(_vec(x, n)), 0.0))

    space = validate_space(_reals("x", 4, -10, 10))
    names = space.names
    defs.append(("levy", space, lambda x, n=names: levy(_vec(x, n)), 0.0))

    space = validate_space(_reals("x", 4, -32.768, 32.768) + [ParamSpec("k", "integer", "linear", -32, 32)])
    names = space.names
    defs.append(("ackley", space, lambda x, n=names: ackley(_vec(x, n)), 0.0))

    space = validate_space(_reals("x", 6, 0, 1))
    names = space.names
    defs.append(("hartmann6", space, lambda x, n=names: hartmann6(_vec(x, n)), -3.3223680114155147))

    space = validate_space(_reals("x", 3, -5, 5) + [ParamSpec("offset", "categorical", categories=("a", "b", "c"))])
    names = space.names[:3]
    defs.append((
        "sphere_cat", space,
        lambda x, n=names: float(np.sum(_vec(x, n) ** 2) + CATEGORY_OFFSETS[x["offset"]]),
        0.0,
    ))
    return defs


def estimate_bounds(
    space: SpaceDefinition,
    func: Callable[[Mapping[str, Any]], float],
    n: int,
    rng: np.random.Generator,
    f_min: float | None = None,
) -> tuple[float, float]:
    """``(f_min, f_max)`` from ``n`` scrambled-Sobol samples in the unit cube.

    ``f_max`` is the 97.5th percentile; ``f_min`` is the declared analytic
    value when given, otherwise the sample minimum.
    """
    if n < 10_000:
        raise ValueError("need at least 10^4 samples")
    U = qmc.Sobol(space.encoded_dim, scramble=True, seed=rng).random(n)
    values = np.array([func(unwarp(u, space)) for u in U])
    if np.ptp(values) == 0:
        raise ValueError("constant objective has no usable bounds")
    lo = float(values.min()) if f_min is None else float(f_min)
    return lo, float(np.percentile(values, 97.5))


# Frozen output of estimate_bounds(..., n=BOUNDS_SAMPLES, rng=default_rng(BOUNDS_SEED)).
STORED_F_MAX = {
    "branin": 183.3591551191402,
    "rosenbrock": 808205.6126593957,
    "levy": 108.83543763082506,
    "ackley": 21.70877054232252,
    "hartmann6": -0.000826056318994936,
    "sphere_cat": 53.61066442285811,
}


def synthetic_suite(noise: bool = False) -> list[Objective]:
    suite = [Objective(name, space, func, f_min, STORED_F_MAX[name]) for name, space, func, f_min in _definitions()]
    if noise:
        suite = [o.with_noise() for o in suite]
    return suite


def get_objective(name: str) -> Objective:
    for obj in synthetic_suite() + synthetic_suite(noise=True):
        if obj.name == name:
            return obj
    raise ValueError(f"unknown objective {name!r}")
