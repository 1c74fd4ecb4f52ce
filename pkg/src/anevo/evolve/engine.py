"""Generation loop: evaluate, rank, adapt resistance, breed."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from ..neuro import Genome, InitScheme, Topology, Uniform, init_genome
from ..seeding import STREAM_BREED, STREAM_EVAL, STREAM_INIT, derive_seed, make_rng
from .config import Algorithm, EvolutionConfig
from .operators import checkered_crossover, layer_swap_crossover, mutate
from .resistance import MutationController, update_resistance

log = logging.getLogger(__name__)

RUNLOG_COLUMNS = (
    "generation",
    "winner_slot",
    "winner_fitness",
    "normalized_score",
    "resistance",
    "optimal_count",
)


class Environment(Protocol):
    """What the engine needs from a task."""

    @property
    def max_fitness(self) -> float | None: ...

    def evaluate(self, genome: Genome, seed: int) -> float: ...


class EvaluationError(RuntimeError):
    def __init__(self, generation: int, slot: int, cause: BaseException | str):
        self.generation = generation
        self.slot = slot
        super().__init__(f"evaluation failed at generation {generation}, slot {slot}: {cause}")


@dataclass(frozen=True)
class GenerationRecord:
    generation_index: int
    fitnesses: tuple[float, ...]
    winner_slot: int
    winner_fitness: float
    normalized_score: float
    resistance_used: float
    optimal_count: int

    def csv_row(self) -> list[str]:
        return [
            str(self.generation_index),
            str(self.winner_slot),
            repr(float(self.winner_fitness)),
            repr(float(self.normalized_score)),
            repr(float(self.resistance_used)),
            str(self.optimal_count),
        ]


@dataclass(frozen=True)
class Termination:
    """Stop after ``max_generations`` or once ``optimal_count`` genomes hit the
    task maximum, whichever happens first. Either may be ``None``, not both."""

    max_generations: int | None = None
    optimal_count: int | None = None

    def __post_init__(self):
        if self.max_generations is None and self.optimal_count is None:
            raise ValueError("termination needs max_generations, optimal_count, or both")
        if self.max_generations is not None and self.max_generations < 0:
            raise ValueError("max_generations must be >= 0")
        if self.optimal_count is not None and self.optimal_count < 1:
            raise ValueError("optimal_count must be >= 1")


@dataclass
class RunLog:
    records: list[GenerationRecord] = field(default_factory=list)
    final_population: list[Genome] = field(default_factory=list)
    stop_reason: str = ""
    winner: Genome | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RUNLOG_COLUMNS)
        for rec in self.records:
            w.writerow(rec.csv_row())
        return buf.getvalue()


def rank_slots(fitnesses: Sequence[float]) -> list[int]:
    """Slots ordered best first; equal fitness keeps the lower slot first."""
    return sorted(range(len(fitnesses)), key=lambda i: (-fitnesses[i], i))


def select_and_breed_anv1(
    ranked: Sequence[tuple[Genome, float]],
    mc: MutationController,
    cfg: EvolutionConfig,
    rng: np.random.Generator,
) -> list[Genome]:
    """Winner, then royal family, then winner x next-best members.

    ``ranked`` is best first. The winner is copied untouched to slot 0. Royal
    slots cross the winner with itself (which reproduces the winner exactly)
    and mutate the result. Remaining slots cross the winner with the
    next-ranked members, taking the first child on even slots and the second
    on odd slots.
    """
    n = cfg.population_size
    if len(ranked) != n:
        raise ValueError(f"expected {n} ranked genomes, got {len(ranked)}")
    p = mc.selection_prob
    mag, dist = cfg.mutation_magnitude, cfg.mutation_distribution
    winner = ranked[0][0]
    nxt = [winner]
    for _ in range(cfg.royal_family_size):
        clone, _ = checkered_crossover(winner, winner)
        nxt.append(mutate(clone, p, mag, dist, rng))
    members = ranked[1 : n - cfg.royal_family_size]
    for member, _ in members:
        slot = len(nxt)
        c1, c2 = checkered_crossover(winner, member)
        nxt.append(mutate(c1 if slot % 2 == 0 else c2, p, mag, dist, rng))
    return nxt


def rank_weights(n: int) -> np.ndarray:
    """Linear rank weights: rank r gets n - r, normalized."""
    w = np.arange(n, 0, -1, dtype=np.float64)
    return w / w.sum()


def select_and_breed_baseline(
    ranked: Sequence[tuple[Genome, float]],
    cfg: EvolutionConfig,
    rng: np.random.Generator,
) -> list[Genome]:
    n = cfg.population_size
    if len(ranked) != n:
        raise ValueError(f"expected {n} ranked genomes, got {len(ranked)}")
    probs = rank_weights(n)
    out = []
    for _ in range(n):
        i, j = rng.choice(n, size=2, p=probs)
        child = layer_swap_crossover(ranked[i][0], ranked[j][0], rng)
        out.append(
            mutate(child, cfg.baseline_mutation_prob, cfg.mutation_magnitude, cfg.mutation_distribution, rng)
        )
    return out


def evaluate_population(
    population: Sequence[Genome],
    env: Environment,
    seeds: Sequence[int],
    generation: int,
    workers: int = 1,
) -> list[float]:
    def one(slot: int) -> float:
        try:
            f = float(env.evaluate(population[slot], seeds[slot]))
        except Exception as exc:
            raise EvaluationError(generation, slot, exc) from exc
        if not math.isfinite(f):
            raise EvaluationError(generation, slot, f"non-finite fitness {f}")
        return f

    slots = range(len(population))
    if workers <= 1:
        return [one(s) for s in slots]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, slots))


def run_generation(
    population: Sequence[Genome],
    env: Environment,
    mc: MutationController,
    cfg: EvolutionConfig,
    rng: np.random.Generator,
    *,
    generation: int = 0,
    master_seed: int = 0,
    workers: int = 1,
) -> tuple[list[Genome], GenerationRecord]:
    """Evaluate ``population`` and breed its successor.

    Each slot is evaluated with its own seed derived from
    ``(master_seed, generation, slot)``, so results do not depend on
    ``workers``. ``rng`` is used only for breeding.
    """
    n = cfg.population_size
    if len(population) != n:
        raise ValueError(f"population has {len(population)} genomes, config says {n}")
    seeds = [derive_seed(master_seed, STREAM_EVAL, generation, s) for s in range(n)]
    fitnesses = evaluate_population(population, env, seeds, generation, workers)

    order = rank_slots(fitnesses)
    winner_slot = order[0]
    winner_fitness = fitnesses[winner_slot]
    if cfg.algorithm is Algorithm.ANV1:
        resistance = update_resistance(mc, winner_fitness, cfg)
    else:
        resistance = round(1.0 - cfg.baseline_mutation_prob, 12)

    cap = env.max_fitness
    optimal = 0 if cap is None else sum(1 for f in fitnesses if f >= cap)
    record = GenerationRecord(
        generation_index=generation,
        fitnesses=tuple(fitnesses),
        winner_slot=winner_slot,
        winner_fitness=winner_fitness,
        normalized_score=sum(fitnesses) / n,
        resistance_used=resistance,
        optimal_count=optimal,
    )

    ranked = [(population[i], fitnesses[i]) for i in order]
    if cfg.algorithm is Algorithm.ANV1:
        nxt = select_and_breed_anv1(ranked, mc, cfg, rng)
    else:
        nxt = select_and_breed_baseline(ranked, cfg, rng)
    return nxt, record


def initial_population(
    cfg: EvolutionConfig, topology: Topology, init: InitScheme, master_seed: int
) -> list[Genome]:
    rng = make_rng(derive_seed(master_seed, STREAM_INIT))
    return [init_genome(topology, init, rng) for _ in range(cfg.population_size)]


OnGeneration = Callable[[GenerationRecord, Sequence[Genome]], None]


def evolve_until(
    cfg: EvolutionConfig,
    env: Environment,
    termination: Termination,
    master_seed: int,
    *,
    topology: Topology,
    init: InitScheme = Uniform(-1.0, 1.0),
    workers: int = 1,
    on_generation: OnGeneration | None = None,
) -> RunLog:
    """Run generations until ``termination`` fires.

    ``on_generation`` receives each record together with the population that
    was evaluated to produce it (e.g. for checkpointing the winner).
    """
    if termination.optimal_count is not None and termination.optimal_count > cfg.population_size:
        raise ValueError(
            f"optimal_count {termination.optimal_count} exceeds population size {cfg.population_size}"
        )
    population = initial_population(cfg, topology, init, master_seed)
    mc = MutationController.start(cfg)
    runlog = RunLog()
    g = 0
    while True:
        if termination.max_generations is not None and g >= termination.max_generations:
            runlog.stop_reason = "max_generations"
            break
        rng = make_rng(derive_seed(master_seed, STREAM_BREED, g))
        evaluated = population
        population, record = run_generation(
            evaluated, env, mc, cfg, rng, generation=g, master_seed=master_seed, workers=workers
        )
        runlog.records.append(record)
        runlog.winner = evaluated[record.winner_slot]
        if on_generation is not None:
            on_generation(record, evaluated)
        log.debug(
            "gen %d winner=%s norm=%.3f resistance=%.2f optimal=%d",
            g, record.winner_fitness, record.normalized_score, record.resistance_used, record.optimal_count,
        )
        g += 1
        if termination.optimal_count is not None and record.optimal_count >= termination.optimal_count:
            runlog.stop_reason = "optimal_count"
            break
    runlog.final_population = list(population)
    return runlog
