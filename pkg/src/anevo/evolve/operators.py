"""Crossover and mutation on flat genomes."""

from __future__ import annotations

import enum

import numpy as np

from ..neuro import Genome


class MutationDistribution(str, enum.Enum):
    UNIFORM_ADDITIVE = "uniform_additive"
    GAUSSIAN_ADDITIVE = "gaussian_additive"
    UNIFORM_REPLACE = "uniform_replace"


def _check_pair(a: Genome, b: Genome) -> None:
    if a.topology != b.topology:
        raise ValueError(
            f"parents have different topologies ({a.topology.header()} vs {b.topology.header()})"
        )


def checkered(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`checkered_crossover`."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"parent shapes differ: {a.shape} vs {b.shape}")
    even = np.arange(a.size) % 2 == 0
    return np.where(even, a, b), np.where(even, b, a)


def checkered_crossover(a: Genome, b: Genome) -> tuple[Genome, Genome]:
    """Alternate parents weight by weight.

    The first child takes even indices from ``a`` and odd ones from ``b``;
    the second child is its complement.
    """
    _check_pair(a, b)
    c1, c2 = checkered(a.weights, b.weights)
    return Genome(c1, a.topology), Genome(c2, a.topology)


def layer_swap_crossover(a: Genome, b: Genome, rng: np.random.Generator) -> Genome:
    """Copy each layer block (weights and biases) whole from a coin-picked parent."""
    _check_pair(a, b)
    child = a.weights.copy()
    for block in a.topology.layer_slices():
        if rng.random() >= 0.5:
            child[block] = b.weights[block]
    return Genome(child, a.topology)


def mutate(
    g: Genome,
    selection_prob: float,
    magnitude: float,
    dist: MutationDistribution | str,
    rng: np.random.Generator,
) -> Genome:
    """Perturb each weight independently with probability ``selection_prob``.

    Unselected weights are returned bit-identical. The noise array is drawn
    for every position so the stream consumption does not depend on the mask.
    """
    if not 0.0 <= selection_prob <= 1.0:
        raise ValueError(f"selection_prob must be in [0, 1], got {selection_prob}")
    dist = MutationDistribution(dist)
    n = len(g)
    mask = rng.random(n) < selection_prob
    w = g.weights
    if dist is MutationDistribution.UNIFORM_ADDITIVE:
        new = w + rng.uniform(-magnitude, magnitude, size=n)
    elif dist is MutationDistribution.GAUSSIAN_ADDITIVE:
        new = w + rng.normal(0.0, magnitude, size=n)
    else:
        new = rng.uniform(-magnitude, magnitude, size=n)
    return Genome(np.where(mask, new, w), g.topology)
