"""Seeded suggest/observe experiments and their records."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Protocol

import numpy as np

from ..controller import PRESETS, SPBOpt, SpboptConfig, disable_partition, preset
from ..space import SpaceDefinition, unwarp
from .objectives import Objective
from .scoring import score


class Optimizer(Protocol):
    def suggest(self) -> list[dict[str, Any]]: ...

    def observe(self, points, values) -> None: ...


MethodFactory = Callable[[SpaceDefinition, int, int, int], Optimizer]


class ProtocolViolation(RuntimeError):
    """A method broke the suggest/observe contract during an experiment."""


class RandomSearch:
    """Uniform draws over the unit cube, unwarped into the space."""

    def __init__(self, space: SpaceDefinition, batch_size: int = 8, seed: int | None = 0):
        self.space = space
        self.batch_size = batch_size
        self.rng = np.random.default_rng(seed)

    def suggest(self) -> list[dict[str, Any]]:
        U = self.rng.random((self.batch_size, self.space.encoded_dim))
        return [unwarp(u, self.space) for u in U]

    def observe(self, points, values) -> None:
        pass


def spbopt_factory(config: SpboptConfig) -> MethodFactory:
    def make(space, K, B, seed):
        return SPBOpt(space, replace(config, K=K, B=B, seed=seed))

    return make


def method_factory(name: str, config: SpboptConfig | None = None) -> MethodFactory:
    """Factory for ``random``, ``turbo_lite`` or a preset name.

    ``config`` overrides the preset for SPBOpt-based methods.
    """
    if name == "random":
        return lambda space, K, B, seed: RandomSearch(space, B, seed)
    if name == "turbo_lite":
        return spbopt_factory(disable_partition(config or preset("spbopt2")))
    if name in PRESETS:
        return spbopt_factory(config or preset(name))
    if config is not None:
        return spbopt_factory(config)
    raise ValueError(f"unknown method {name!r}")


@dataclass
class RunRecord:
    objective: str
    method: str
    seed: int
    trace: list[dict[str, Any]] = field(default_factory=list)  # [{"x": ..., "y": ...}]
    incumbents: list[float] = field(default_factory=list)
    score: float = float("nan")

    def to_json(self) -> str:
        return json.dumps(
            {
                "objective": self.objective,
                "method": self.method,
                "seed": self.seed,
                "trace": self.trace,
                "incumbents": self.incumbents,
                "score": self.score,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls(**json.loads(text))


def run_experiment(
    objective: Objective,
    method: MethodFactory,
    K: int = 16,
    B: int = 8,
    seed: int = 0,
    method_name: str = "method",
) -> RunRecord:
    """Drive ``K`` suggest/observe rounds of ``B`` points and score the best value."""
    opt = method(objective.space, K, B, seed)
    noise_rng = objective.noise_rng(seed)
    record = RunRecord(objective.name, method_name, seed)
    best = np.inf
    for k in range(K):
        points = opt.suggest()
        if len(points) != B:
            raise ProtocolViolation(f"{method_name}: iteration {k + 1} suggested {len(points)} points, expected {B}")
        for x in points:
            if not objective.space.contains(x):
                raise ProtocolViolation(f"{method_name}: iteration {k + 1} suggested out-of-space point {x}")
        values = [objective(x, noise_rng) for x in points]
        opt.observe(points, values)
        for x, y in zip(points, values):
            record.trace.append({"x": dict(x), "y": y})
        best = min(best, min(values))
        record.incumbents.append(best)
    record.score = score(best, objective.f_min, objective.f_max)
    return record
