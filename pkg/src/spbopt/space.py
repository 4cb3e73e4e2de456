"""Typed, warped parameter spaces and their encoding to the unit hypercube.

All optimizer internals work on points ``u`` in ``[0, 1]^encoded_dim``.
Real and integer parameters take one coordinate after a monotone warp,
booleans take one coordinate thresholded at 0.5, and categoricals take a
one-hot block decoded by argmax.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from os import PathLike
from typing import Any, Mapping, Sequence

import numpy as np

KINDS = ("real", "integer", "categorical", "boolean")
WARPS = ("linear", "log", "logit", "bilog")

# JSON short names used by space definition files.
_JSON_KINDS = {"real": "real", "int": "integer", "cat": "categorical", "bool": "boolean"}


def _logit(x):
    return np.log(x / (1.0 - x))


def _expit(z):
    return 1.0 / (1.0 + np.exp(-z))


def _bilog(x):
    return np.sign(x) * np.log1p(np.abs(x))


def _bilog_inv(z):
    return np.sign(z) * np.expm1(np.abs(z))


_FORWARD = {"linear": lambda x: x, "log": np.log, "logit": _logit, "bilog": _bilog}
_INVERSE = {"linear": lambda z: z, "log": np.exp, "logit": _expit, "bilog": _bilog_inv}


@dataclass(frozen=True)
class ParamSpec:
    """A single named parameter.

    ``lo``/``hi`` are used by real and integer parameters, ``categories``
    only by categoricals. Booleans carry neither.
    """

    name: str
    kind: str
    warp: str = "linear"
    lo: float | None = None
    hi: float | None = None
    categories: tuple[str, ...] = ()

    @property
    def width(self) -> int:
        return len(self.categories) if self.kind == "categorical" else 1

    def _check(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"{self.name}: unknown kind {self.kind!r}")
        if self.kind in ("real", "integer"):
            if self.warp not in WARPS:
                raise ValueError(f"{self.name}: unknown warp {self.warp!r}")
            if self.lo is None or self.hi is None:
                raise ValueError(f"{self.name}: bounds required")
            lo, hi = self.lo, self.hi
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"{self.name}: bounds must be finite")
            if self.kind == "real" and not lo < hi:
                raise ValueError(f"{self.name}: need lo < hi, got ({lo}, {hi})")
            if self.kind == "integer" and not lo <= hi:
                raise ValueError(f"{self.name}: need lo <= hi, got ({lo}, {hi})")
            if self.warp == "log" and lo <= 0:
                raise ValueError(f"{self.name}: log warp needs lo > 0")
            if self.warp == "logit" and not (0 < lo and hi < 1):
                raise ValueError(f"{self.name}: logit warp needs 0 < lo < hi < 1")
        elif self.kind == "categorical":
            if len(self.categories) < 2:
                raise ValueError(f"{self.name}: categorical needs >= 2 categories")
            if len(set(self.categories)) != len(self.categories):
                raise ValueError(f"{self.name}: duplicate categories")

    def _warped_bounds(self) -> tuple[float, float]:
        f = _FORWARD[self.warp]
        return float(f(self.lo)), float(f(self.hi))


@dataclass(frozen=True)
class SpaceDefinition:
    params: tuple[ParamSpec, ...]

    @property
    def encoded_dim(self) -> int:
        return sum(p.width for p in self.params)

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.params]

    def blocks(self):
        """Yield ``(param, start, stop)`` slices of the encoded vector."""
        start = 0
        for p in self.params:
            yield p, start, start + p.width
            start += p.width

    def warp(self, x: Mapping[str, Any]) -> np.ndarray:
        return warp(x, self)

    def unwarp(self, u) -> dict[str, Any]:
        return unwarp(u, self)

    def contains(self, x: Mapping[str, Any]) -> bool:
        try:
            warp(x, self)
        except (KeyError, ValueError):
            return False
        return True


def validate_space(specs: Sequence[ParamSpec]) -> SpaceDefinition:
    """Check a list of parameter specs and freeze it into a space."""
    specs = list(specs)
    if not specs:
        raise ValueError("space must have at least one parameter")
    seen = set()
    for p in specs:
        if p.name in seen:
            raise ValueError(f"duplicate parameter name {p.name!r}")
        seen.add(p.name)
        p._check()
    return SpaceDefinition(tuple(specs))


def _warp_scalar(p: ParamSpec, value) -> float:
    if isinstance(value, (bool, np.bool_)) or not np.isfinite(value):
        raise ValueError(f"{p.name}: invalid value {value!r}")
    if p.kind == "integer" and value != round(value):
        raise ValueError(f"{p.name}: integer parameter got {value!r}")
    if not (p.lo <= value <= p.hi):
        raise ValueError(f"{p.name}: {value!r} outside [{p.lo}, {p.hi}]")
    if p.lo == p.hi:
        return 0.0
    a, b = p._warped_bounds()
    z = float(_FORWARD[p.warp](float(value)))
    return min(max((z - a) / (b - a), 0.0), 1.0)


def warp(x: Mapping[str, Any], space: SpaceDefinition) -> np.ndarray:
    """Map an original-space assignment to a point in the unit hypercube."""
    u = np.zeros(space.encoded_dim)
    for p, start, stop in space.blocks():
        value = x[p.name]
        if p.kind in ("real", "integer"):
            u[start] = _warp_scalar(p, value)
        elif p.kind == "boolean":
            if not isinstance(value, (bool, np.bool_)):
                raise ValueError(f"{p.name}: expected bool, got {value!r}")
            u[start] = 1.0 if value else 0.0
        else:
            try:
                u[start + p.categories.index(value)] = 1.0
            except ValueError:
                raise ValueError(f"{p.name}: unknown category {value!r}") from None
    return u


def _round_half_away(v: float) -> float:
    return math.copysign(math.floor(abs(v) + 0.5), v)


def unwarp(u, space: SpaceDefinition) -> dict[str, Any]:
    """Inverse of :func:`warp`.

    Integers round half away from zero and are clamped to bounds,
    booleans threshold at 0.5, and categoricals take the argmax of their
    block (ties go to the lowest index).
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (space.encoded_dim,):
        raise ValueError(f"expected vector of length {space.encoded_dim}, got shape {u.shape}")
    u = np.clip(u, 0.0, 1.0)
    x: dict[str, Any] = {}
    for p, start, stop in space.blocks():
        if p.kind in ("real", "integer"):
            if p.lo == p.hi:
                v = float(p.lo)
            else:
                a, b = p._warped_bounds()
                v = float(_INVERSE[p.warp](a + u[start] * (b - a)))
                v = min(max(v, p.lo), p.hi)
            if p.kind == "integer":
                v = int(min(max(_round_half_away(v), math.ceil(p.lo)), math.floor(p.hi)))
            x[p.name] = v
        elif p.kind == "boolean":
            x[p.name] = bool(u[start] >= 0.5)
        else:
            x[p.name] = p.categories[int(np.argmax(u[start:stop]))]
    return x


def space_from_dict(spec: Mapping[str, Mapping[str, Any]]) -> SpaceDefinition:
    """Build a space from the JSON-style mapping ``name -> {type, space, range|values}``."""
    params = []
    for name, entry in spec.items():
        try:
            kind = _JSON_KINDS[entry["type"]]
        except KeyError:
            raise ValueError(f"{name}: unknown or missing type {entry.get('type')!r}") from None
        if kind == "categorical":
            params.append(ParamSpec(name, kind, categories=tuple(entry.get("values", ()))))
        elif kind == "boolean":
            params.append(ParamSpec(name, kind))
        else:
            lo, hi = entry["range"]
            params.append(ParamSpec(name, kind, entry.get("space", "linear"), lo, hi))
    return validate_space(params)


def load_space(path: str | PathLike) -> SpaceDefinition:
    with open(path) as fh:
        return space_from_dict(json.load(fh))


@dataclass(frozen=True)
class Observation:
    """One evaluated point: cube coordinates, original values, objective."""

    u: np.ndarray
    x: dict[str, Any]
    y: float
