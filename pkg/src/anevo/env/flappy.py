"""A Flappy-Bird-style side scroller.

The bird sits at horizontal position 0 and only moves vertically. Heights
grow upward; ``bird_velocity`` is measured downward, so gravity adds to it and
a flap sets it to ``-flap_impulse``. Pipes spawn ``pipe_spacing`` frames apart
at distance ``pipe_spacing * pipe_speed`` and drift toward the bird. A pipe
occupies ``[d, d + pipe_width]`` where ``d`` is its leading-edge distance; it
counts as passed once the trailing edge is behind the bird.

Gap centers for a whole episode are drawn at reset, so a state plus an action
sequence fully determines the trajectory.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from ..neuro import Genome, HiddenActivation, OutputActivation, forward
from ..seeding import make_rng
from . import _kernels

FLAP, NO_FLAP = 1, 0


@dataclass(frozen=True)
class FlappyConfig:
    gravity: float = 0.05
    flap_impulse: float = 0.8
    pipe_speed: float = 0.5
    pipe_gap: float = 12.5
    pipe_width: float = 4.0
    pipe_spacing: int = 60
    world_height: float = 50.0
    max_frames: int = 10_000
    score_per_frame: float = 1.0
    score_per_pipe: float = 50.0

    def __post_init__(self):
        for name in ("gravity", "flap_impulse", "pipe_speed", "pipe_gap", "pipe_width", "world_height"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.pipe_spacing < 1:
            raise ValueError("pipe_spacing must be >= 1")
        if not self.pipe_gap < self.world_height:
            raise ValueError("pipe_gap must be smaller than world_height")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.score_per_frame < 0 or self.score_per_pipe < 0:
            raise ValueError("scores must be non-negative")

    @property
    def spawn_distance(self) -> float:
        return self.pipe_spacing * self.pipe_speed

    @property
    def course_length(self) -> int:
        """Number of pipes that can spawn within ``max_frames``."""
        return self.max_frames // self.pipe_spacing + 1


@dataclass(frozen=True)
class FlappyState:
    bird_height: float
    bird_velocity: float
    pipes: tuple[tuple[float, float], ...]
    frame: int
    alive: bool
    score: float
    course: tuple[float, ...]
    spawned: int


def make_course(cfg: FlappyConfig, seed: int) -> np.ndarray:
    half = cfg.pipe_gap / 2
    return make_rng(seed).uniform(half, cfg.world_height - half, size=cfg.course_length)


def flappy_reset(cfg: FlappyConfig, seed: int) -> FlappyState:
    course = tuple(float(c) for c in make_course(cfg, seed))
    return FlappyState(
        bird_height=cfg.world_height / 2,
        bird_velocity=0.0,
        pipes=((cfg.spawn_distance, course[0]),),
        frame=0,
        alive=True,
        score=0.0,
        course=course,
        spawned=1,
    )


def _collides(height: float, pipes, cfg: FlappyConfig) -> bool:
    if height <= 0.0 or height >= cfg.world_height:
        return True
    half = cfg.pipe_gap / 2
    for d, gc in pipes:
        if d <= 0.0 <= d + cfg.pipe_width and abs(height - gc) > half:
            return True
    return False


def flappy_step(state: FlappyState, action: int, cfg: FlappyConfig) -> FlappyState:
    if not state.alive:
        raise RuntimeError("cannot step a dead bird; reset first")
    v = -cfg.flap_impulse if action == FLAP else state.bird_velocity + cfg.gravity
    h = state.bird_height - v
    pipes = [(d - cfg.pipe_speed, gc) for d, gc in state.pipes]
    frame = state.frame + 1
    if _collides(h, pipes, cfg):
        return dataclasses.replace(
            state, bird_height=h, bird_velocity=v, pipes=tuple(pipes), frame=frame, alive=False
        )
    score = state.score + cfg.score_per_frame
    while pipes and pipes[0][0] + cfg.pipe_width < 0.0:
        pipes.pop(0)
        score += cfg.score_per_pipe
    spawned = state.spawned
    if frame % cfg.pipe_spacing == 0 and spawned < len(state.course):
        pipes.append((cfg.spawn_distance, state.course[spawned]))
        spawned += 1
    return FlappyState(h, v, tuple(pipes), frame, True, score, state.course, spawned)


def flappy_observe(state: FlappyState, cfg: FlappyConfig) -> np.ndarray:
    """``[distance to nearest unpassed pipe, its gap center, bird height]`` in [0, 1]."""
    d, gc = state.pipes[0]
    obs = np.array(
        [max(d, 0.0) / cfg.spawn_distance, gc / cfg.world_height, state.bird_height / cfg.world_height]
    )
    return np.clip(obs, 0.0, 1.0)


def _check_topology(genome: Genome) -> None:
    t = genome.topology
    if t.input_size != 3 or t.output_size != 1:
        raise ValueError(f"flappy needs a 3-input, 1-output network, got {t.header()}")


def flappy_rollout(genome: Genome, cfg: FlappyConfig, seed: int) -> tuple[FlappyState, list[tuple]]:
    """Reference rollout through the step functions; also returns the trajectory
    as ``(frame, height, velocity, score)`` rows."""
    _check_topology(genome)
    state = flappy_reset(cfg, seed)
    rows = [(state.frame, state.bird_height, state.bird_velocity, state.score)]
    while state.alive and state.frame < cfg.max_frames:
        out = forward(genome, flappy_observe(state, cfg))
        state = flappy_step(state, FLAP if out[0] > 0.5 else NO_FLAP, cfg)
        rows.append((state.frame, state.bird_height, state.bird_velocity, state.score))
    return state, rows


_HIDDEN_CODES = {HiddenActivation.SIGMOID: 0, HiddenActivation.TANH: 1, HiddenActivation.RELU: 2}
_OUTPUT_CODES = {OutputActivation.SIGMOID: 0, OutputActivation.SOFTMAX: 1, OutputActivation.IDENTITY: 2}


def evaluate_flappy(genome: Genome, cfg: FlappyConfig, seed: int, *, fast: bool = True) -> float:
    """Score of one episode on the course drawn from ``seed``.

    ``fast`` runs the compiled rollout; ``fast=False`` walks the reference
    step functions (slow, used to cross-check the kernel).
    """
    _check_topology(genome)
    if not fast:
        return flappy_rollout(genome, cfg, seed)[0].score
    t = genome.topology
    return _kernels.flappy_rollout(
        genome.weights,
        np.array(t.layer_sizes, dtype=np.int64),
        _HIDDEN_CODES[t.hidden_activation],
        _OUTPUT_CODES[t.output_activation],
        make_course(cfg, seed),
        cfg.gravity,
        cfg.flap_impulse,
        cfg.pipe_speed,
        cfg.pipe_gap,
        cfg.pipe_width,
        cfg.pipe_spacing,
        cfg.world_height,
        cfg.max_frames,
        cfg.score_per_frame,
        cfg.score_per_pipe,
    )


def max_flappy_score(cfg: FlappyConfig) -> float:
    """Score of a bird that survives all ``max_frames`` frames.

    Pipes move independently of the bird, so the number passed by the cap
    is fixed; replay the pipe schedule with a bird that never collides.
    """
    pipes: list[float] = [cfg.spawn_distance]
    spawned, passed = 1, 0
    for frame in range(1, cfg.max_frames + 1):
        pipes = [d - cfg.pipe_speed for d in pipes]
        while pipes and pipes[0] + cfg.pipe_width < 0.0:
            pipes.pop(0)
            passed += 1
        if frame % cfg.pipe_spacing == 0 and spawned < cfg.course_length:
            pipes.append(cfg.spawn_distance)
            spawned += 1
    return cfg.max_frames * cfg.score_per_frame + passed * cfg.score_per_pipe


class FlappyEnv:
    """Engine-facing wrapper.

    With ``course_seed`` set every evaluation flies the same course, which
    makes the task deterministic; otherwise each evaluation draws its course
    from the seed the engine hands it.
    """

    def __init__(self, cfg: FlappyConfig, course_seed: int | None = None):
        self.cfg = cfg
        self.course_seed = course_seed
        self._max = max_flappy_score(cfg)

    @property
    def max_fitness(self) -> float:
        return self._max

    def _seed(self, seed: int) -> int:
        return seed if self.course_seed is None else self.course_seed

    def evaluate(self, genome: Genome, seed: int) -> float:
        return evaluate_flappy(genome, self.cfg, self._seed(seed))

    def trajectory(self, genome: Genome, seed: int) -> list[tuple]:
        return flappy_rollout(genome, self.cfg, self._seed(seed))[1]

    TRAJECTORY_COLUMNS = ("frame", "height", "velocity", "score")
