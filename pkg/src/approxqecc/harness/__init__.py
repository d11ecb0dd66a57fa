from .exhaustive import ExactResult, exhaustive_oracle
from .sizes import size_report
from .strategies import EMPTY, Strategy, StrategyContext, get_strategy, strategy_library, strategy_names
from .trials import ExperimentReport, clopper_pearson_upper, run_trials, soundness

__all__ = [
    "EMPTY",
    "ExactResult",
    "ExperimentReport",
    "Strategy",
    "StrategyContext",
    "clopper_pearson_upper",
    "exhaustive_oracle",
    "get_strategy",
    "run_trials",
    "size_report",
    "soundness",
    "strategy_library",
    "strategy_names",
]
