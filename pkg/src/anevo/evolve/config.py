from __future__ import annotations

import enum
from dataclasses import dataclass

from .operators import MutationDistribution


class Algorithm(str, enum.Enum):
    ANV1 = "anv1"
    BASELINE = "baseline"


@dataclass(frozen=True)
class EvolutionConfig:
    """Knobs for both breeding schemes.

    ``royal_family_size`` and the resistance fields only matter for ANv1;
    ``baseline_mutation_prob`` only for the layer-swap baseline.
    """

    population_size: int = 15
    royal_family_size: int = 4
    initial_resistance: float = 0.95
    resistance_decrement: float = 0.05
    resistance_floor: float = 0.05
    stagnation_lo: float = -0.05
    stagnation_hi: float = 0.10
    mutation_magnitude: float = 0.3
    mutation_distribution: MutationDistribution = MutationDistribution.GAUSSIAN_ADDITIVE
    algorithm: Algorithm = Algorithm.ANV1
    baseline_mutation_prob: float = 0.15

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        object.__setattr__(
            self, "mutation_distribution", MutationDistribution(self.mutation_distribution)
        )
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        if self.royal_family_size < 0:
            raise ValueError("royal_family_size must be >= 0")
        if 1 + self.royal_family_size > self.population_size:
            raise ValueError(
                f"royal_family_size: winner plus {self.royal_family_size} royals "
                f"do not fit in a population of {self.population_size}"
            )
        if not 0.0 <= self.resistance_floor <= self.initial_resistance <= 1.0:
            raise ValueError("need 0 <= resistance_floor <= initial_resistance <= 1")
        if self.resistance_decrement < 0:
            raise ValueError("resistance_decrement must be >= 0")
        if not self.stagnation_lo < self.stagnation_hi:
            raise ValueError("stagnation_lo must be below stagnation_hi")
        if not self.mutation_magnitude > 0:
            raise ValueError("mutation_magnitude must be positive")
        if not 0.0 <= self.baseline_mutation_prob <= 1.0:
            raise ValueError("baseline_mutation_prob must be in [0, 1]")
