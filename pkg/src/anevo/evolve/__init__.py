from .config import Algorithm, EvolutionConfig
from .engine import (
    RUNLOG_COLUMNS,
    Environment,
    EvaluationError,
    GenerationRecord,
    RunLog,
    Termination,
    evolve_until,
    initial_population,
    rank_slots,
    rank_weights,
    run_generation,
    select_and_breed_anv1,
    select_and_breed_baseline,
)
from .operators import MutationDistribution, checkered, checkered_crossover, layer_swap_crossover, mutate
from .resistance import MutationController, relative_change, update_resistance

__all__ = [
    "Algorithm",
    "Environment",
    "EvaluationError",
    "EvolutionConfig",
    "GenerationRecord",
    "MutationController",
    "MutationDistribution",
    "RUNLOG_COLUMNS",
    "RunLog",
    "Termination",
    "checkered",
    "checkered_crossover",
    "evolve_until",
    "initial_population",
    "layer_swap_crossover",
    "mutate",
    "rank_slots",
    "rank_weights",
    "relative_change",
    "run_generation",
    "select_and_breed_anv1",
    "select_and_breed_baseline",
    "update_resistance",
]
