from .fit import LogLogFit, fit_loglog
from .scenarios import SCENARIOS, GeneratedPair, generate_pair, polygon_sides_for, regular_polygon
from .sweep import (
    Gate,
    PairEvaluator,
    SweepConfig,
    SweepReport,
    SweepRow,
    SweepRunner,
    evaluate_gates,
    run_sweep,
    split_halves,
)

__all__ = [
    "Gate",
    "GeneratedPair",
    "LogLogFit",
    "PairEvaluator",
    "SCENARIOS",
    "SweepConfig",
    "SweepReport",
    "SweepRow",
    "SweepRunner",
    "evaluate_gates",
    "fit_loglog",
    "generate_pair",
    "polygon_sides_for",
    "regular_polygon",
    "run_sweep",
    "split_halves",
]
