from .objectives import Objective, estimate_bounds, get_objective, synthetic_suite
from .runner import ProtocolViolation, RandomSearch, RunRecord, method_factory, run_experiment
from .scoring import ScoreReport, aggregate, score, wilcoxon_signed_rank

__all__ = [
    "Objective",
    "ProtocolViolation",
    "RandomSearch",
    "RunRecord",
    "ScoreReport",
    "aggregate",
    "estimate_bounds",
    "get_objective",
    "method_factory",
    "run_experiment",
    "score",
    "synthetic_suite",
    "wilcoxon_signed_rank",
]
