"""Adaptive mutation resistance.

Resistance is one minus the per-weight mutation probability. Each generation
the winner's fitness is compared with the previous winner's; a relative
change inside the stagnation band lowers resistance by one decrement (down to
the floor), anything outside the band resets it to the initial value.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import EvolutionConfig

EPS = 1e-9
# Resistances live on a decimal grid so chained decrements compare exactly
# (0.95 - 0.05 is 0.8999999999999999 in binary floating point).
_GRID_DIGITS = 12


def relative_change(winner: float, previous: float) -> float:
    return (winner - previous) / max(abs(previous), EPS)


@dataclass
class MutationController:
    current_resistance: float
    previous_winner_fitness: float | None = None

    @classmethod
    def start(cls, cfg: EvolutionConfig) -> "MutationController":
        return cls(current_resistance=cfg.initial_resistance)

    @property
    def selection_prob(self) -> float:
        return round(1.0 - self.current_resistance, _GRID_DIGITS)

    def update(self, winner_fitness: float, cfg: EvolutionConfig) -> float:
        return update_resistance(self, winner_fitness, cfg)


def is_stagnant(winner: float, previous: float, cfg: EvolutionConfig) -> bool:
    return cfg.stagnation_lo <= relative_change(winner, previous) <= cfg.stagnation_hi


def update_resistance(mc: MutationController, winner_fitness: float, cfg: EvolutionConfig) -> float:
    """Advance ``mc`` by one generation and return the new resistance."""
    prev = mc.previous_winner_fitness
    if prev is not None and is_stagnant(winner_fitness, prev, cfg):
        lowered = round(mc.current_resistance - cfg.resistance_decrement, _GRID_DIGITS)
        mc.current_resistance = max(lowered, cfg.resistance_floor)
    else:
        mc.current_resistance = cfg.initial_resistance
    mc.previous_winner_fitness = float(winner_fitness)
    return mc.current_resistance
