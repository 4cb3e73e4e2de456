"""The SPBOpt suggest/observe optimizer.

One iteration is one ``suggest()`` of ``B`` points followed by one
``observe()``. The optimizer first replays an initial design, then builds
a partition of the evaluated points, and runs a trust-region GP optimizer
inside the selected region. The partition is rebuilt every ``n_rebuild``
iterations, and everything is discarded when the best value has not moved
over the last ``n_reset`` iterations.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, fields, replace
from os import PathLike
from typing import Any, Mapping, Sequence

import numpy as np

from .partition import PartitionPath, build_partition, in_region, region_margin
from .sampling import SAMPLERS, initial_design, latin_hypercube
from .space import Observation, SpaceDefinition, unwarp, warp
from .surrogate import GpModel, fit_gp
from .turbo import TrustRegion, init_trust_region, propose_batch, update_trust_region

logger = logging.getLogger(__name__)

# Imputed value for a failed evaluation when nothing finite has been seen.
FAILED_VALUE = 1e10

CONFIG_KEYS = (
    "sampler", "n_init", "split_kind", "split_kernel", "split_C", "decay",
    "n_rebuild", "n_reset", "max_depth", "min_leaf", "seed",
)


class ProtocolError(RuntimeError):
    """suggest/observe called out of order or with foreign points."""


@dataclass(frozen=True)
class SpboptConfig:
    sampler: str = "lhs_ratio"
    n_init: int = 24
    split_kind: str = "svm"
    split_kernel: str = "poly"
    split_C: float = 745.322745
    decay: float = 0.499
    n_rebuild: int = 4
    n_reset: int = 8
    max_depth: int = 5
    min_leaf: int = 8
    K: int = 16
    B: int = 8
    seed: int | None = 0
    split_k: int = 5
    lhs_restarts: int = 100

    def __post_init__(self):
        if self.sampler not in SAMPLERS:
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.split_kind not in ("svm", "knn"):
            raise ValueError(f"unknown split model {self.split_kind!r}")
        if self.split_kernel not in ("linear", "poly", "rbf"):
            raise ValueError(f"unknown split kernel {self.split_kernel!r}")
        if self.split_C <= 0:
            raise ValueError("split_C must be positive")
        if not 0 < self.decay <= 1:
            raise ValueError("decay must be in (0, 1]")
        if self.K < 1 or self.B < 1:
            raise ValueError("K and B must be positive")
        if not 2 <= self.n_init <= self.K * self.B:
            raise ValueError("n_init must be in [2, K*B]")
        if min(self.n_rebuild, self.n_reset, self.max_depth, self.min_leaf) < 1:
            raise ValueError("n_rebuild, n_reset, max_depth and min_leaf must be positive")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


# Shipped presets; the rest of each config keeps the defaults above.
PRESETS: dict[str, SpboptConfig] = {
    "spbopt1": SpboptConfig("lhs_ratio", 8, "svm", "rbf", 0.002762, 0.700),
    "spbopt2": SpboptConfig("lhs_ratio", 24, "svm", "poly", 745.322745, 0.499),
    "spbopt3": SpboptConfig("lhs_ratio", 24, "svm", "rbf", 145.415497, 0.416),
    "spbopt4": SpboptConfig("lhs_ratio", 24, "svm", "rbf", 165.066908, 0.549),
    "spbopt5": SpboptConfig("lhs_ratio", 24, "svm", "rbf", 76.7041709, 0.677),
}


def preset(name: str, **overrides) -> SpboptConfig:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(base, **overrides)


def config_from_dict(data: Mapping[str, Any], base: SpboptConfig | None = None) -> SpboptConfig:
    known = {f.name for f in fields(SpboptConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return replace(base or SpboptConfig(), **data)


def load_config(path: str | PathLike, base: SpboptConfig | None = None) -> SpboptConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh), base)


def disable_partition(config: SpboptConfig) -> SpboptConfig:
    """Same optimizer with a ``min_leaf`` no dataset can reach: plain trust region."""
    return replace(config, min_leaf=config.K * config.B + 1)


class SPBOpt:
    """Batch optimizer over a :class:`SpaceDefinition`.

    Examples
    --------
    >>> opt = SPBOpt(space, preset("spbopt2", seed=3))
    >>> for _ in range(16):
    ...     xs = opt.suggest()
    ...     opt.observe(xs, [f(x) for x in xs])
    """

    def __init__(self, space: SpaceDefinition, config: SpboptConfig | None = None):
        self.space = space
        self.config = config or SpboptConfig()
        self.dim = space.encoded_dim
        self._seeds = np.random.SeedSequence(self.config.seed)
        self.rng = np.random.default_rng(self._seeds.spawn(1)[0])

        self.t = 0
        self.n_resets = 0
        self.history: list[Observation] = []
        self.best_y_history: list[float] = []
        # instrumentation: rebuild/reset events and per-update trust-region lengths
        self.events: list[dict[str, Any]] = []
        self.trust_trace: list[dict[str, Any]] = []
        self._design_used = 0
        self._reset_checked = -1
        self._start()

    # -- state -------------------------------------------------------------

    def _start(self) -> None:
        cfg = self.config
        self.dataset: list[Observation] = []
        self.partition: PartitionPath | None = None
        self.trust: TrustRegion | None = None
        self.gp: GpModel | None = None
        self.phase = "initializing"
        self.pending: tuple[np.ndarray, list[dict[str, Any]]] | None = None
        self.t_init: int | None = None

        # keep at least one optimizing iteration after a late reset
        n = min(cfg.n_init, (cfg.K - self.t) * cfg.B - cfg.B)
        n = max(n, 2)
        rng = np.random.default_rng(self._seeds.spawn(1)[0])
        design = initial_design(
            cfg.sampler, n, self.dim, rng, n_restarts=cfg.lhs_restarts, skip=self._design_used
        )
        pad = -n % cfg.B
        if pad:
            if cfg.sampler in ("lhs", "lhs_ratio"):
                extra = latin_hypercube(pad, self.dim, rng)
            else:
                extra = initial_design(cfg.sampler, pad, self.dim, rng, skip=self._design_used + n)
            design = np.vstack([design, extra])
        self._design_used += len(design)
        self.design = design
        self._design_pos = 0

    @property
    def best(self) -> Observation | None:
        """Best observation over the whole run, resets included."""
        if not self.history:
            return None
        return min(self.history, key=lambda o: o.y)

    def region_fn(self):
        if self.partition is None or self.partition.depth == 0:
            return None
        path = self.partition
        return lambda U: region_margin(path, U)

    # -- protocol ----------------------------------------------------------

    def suggest(self) -> list[dict[str, Any]]:
        """Return the next batch of ``B`` points in the original space."""
        if self.pending is not None:
            raise ProtocolError("suggest called twice without observe")
        B = self.config.B
        if self.phase == "initializing":
            U = self.design[self._design_pos : self._design_pos + B]
            self._design_pos += len(U)
        else:
            U = propose_batch(self.trust, self.gp, self.region_fn(), B, self.rng)
        U, X = self._decode(U)
        self.pending = (U, X)
        return [dict(x) for x in X]

    def _decode(self, U: np.ndarray):
        """Unwarp a batch, re-drawing rows that collide after rounding."""
        seen: set[tuple] = set()
        out_u, out_x = [], []
        for u in U:
            x = unwarp(u, self.space)
            for _ in range(20):
                key = tuple(x[n] for n in self.space.names)
                if key not in seen:
                    break
                x = unwarp(self._redraw(), self.space)
            seen.add(tuple(x[n] for n in self.space.names))
            out_u.append(warp(x, self.space))
            out_x.append(x)
        return np.array(out_u), out_x

    def _redraw(self) -> np.ndarray:
        if self.trust is None or self.phase == "initializing":
            return self.rng.random(self.dim)
        lb, ub = self.trust.box()
        return lb + (ub - lb) * self.rng.random(self.dim)

    def observe(self, points: Sequence[Mapping[str, Any]], values: Sequence[float]) -> None:
        """Record the objective values of the pending batch and advance one iteration."""
        if self.pending is None:
            raise ProtocolError("observe called without a pending suggest")
        U, X = self.pending
        if len(points) != len(X) or len(values) != len(X):
            raise ValueError(f"expected {len(X)} points and values")
        for p, x in zip(points, X):
            if dict(p) != x:
                raise ProtocolError(f"observed point {dict(p)} was not suggested")

        y = self._impute(np.asarray(values, dtype=float))
        prev_best = min((o.y for o in self.dataset), default=np.inf)
        batch = [Observation(u, x, float(v)) for u, x, v in zip(U, X, y)]
        self.dataset.extend(batch)
        self.history.extend(batch)
        self.pending = None
        self.t += 1
        global_prev = self.best_y_history[-1] if self.best_y_history else np.inf
        self.best_y_history.append(min(global_prev, float(y.min())))

        rebuild = False
        if self.phase == "initializing" and self._design_pos >= len(self.design):
            self.phase, self.t_init, rebuild = "optimizing", self.t, True
        elif self.phase == "optimizing":
            rebuild = (self.t - self.t_init) % self.config.n_rebuild == 0
        if self.phase == "optimizing":
            self._step_local(rebuild, float(y.min()), prev_best)
        self.maybe_reset()

    def _impute(self, y: np.ndarray) -> np.ndarray:
        bad = ~np.isfinite(y)
        if bad.any():
            finite = [o.y for o in self.history] + list(y[~bad])
            y = y.copy()
            y[bad] = max(finite) if finite else FAILED_VALUE
            logger.warning("imputed %d non-finite objective values", int(bad.sum()))
        return y

    def _step_local(self, rebuild: bool, batch_min: float, prev_best: float) -> None:
        cfg = self.config
        U = np.array([o.u for o in self.dataset])
        Y = np.array([o.y for o in self.dataset])
        if rebuild:
            self.partition = build_partition(
                U, Y, kind=cfg.split_kind, kernel=cfg.split_kernel, C=cfg.split_C,
                max_depth=cfg.max_depth, min_leaf=cfg.min_leaf, k=cfg.split_k,
            )
            self.events.append({"t": self.t, "event": "rebuild", "depth": self.partition.depth})
        local = in_region(self.partition, U) if self.partition.depth else np.ones(len(U), bool)
        if local.sum() < 2:
            local = np.ones(len(U), bool)
        Ul, Yl = U[local], Y[local]
        init = None if (rebuild or self.gp is None) else self.gp.params
        self.gp = fit_gp(Ul, Yl, rng=self.rng, init_params=init)
        center = Ul[int(np.argmin(Yl))]
        if rebuild:
            self.trust = init_trust_region(self.dim, center)
        before = self.trust.length
        self.trust = update_trust_region(
            self.trust, batch_min, prev_best, self.t, cfg.K, cfg.decay, new_center=center
        )
        self.trust_trace.append({
            "t": self.t, "length_before": before, "length_after": self.trust.length,
            "event": self.trust.last_event, "rebuild": rebuild,
        })
        if self.trust.collapsed:
            logger.info("trust region collapsed at t=%d (length %.3g)", self.t, self.trust.length)

    def maybe_reset(self) -> bool:
        """Restart from a fresh design if the best value is unchanged over ``n_reset`` iterations.

        Checked once per iteration, at multiples of ``n_reset``. The
        comparison point is the best value after iteration ``t - n_reset``
        (after the first iteration when that is zero).
        """
        t, n_reset = self.t, self.config.n_reset
        if t == 0 or t % n_reset or self._reset_checked == t:
            return False
        self._reset_checked = t
        before = self.best_y_history[max(t - n_reset, 1) - 1]
        if self.best_y_history[-1] != before:
            return False
        self.n_resets += 1
        self.events.append({"t": t, "event": "reset"})
        self._start()
        return True
