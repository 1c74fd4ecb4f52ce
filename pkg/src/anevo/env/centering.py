"""Simulated single-axis object centering.

The head turns in fixed yaw increments. ``relative_azimuth`` is the object's
bearing minus the head yaw, so a negative value means the object appears on
the left. Turning toward the object (MoveLeft when it is on the left) raises
the azimuth by one ``yaw_step``.

A location oracle stands in for the image classifier: it bins the azimuth
into Left/Center/Right (or NoImage outside the field of view) and can be made
to misreport with a fixed probability. The control net sees the reported
class one-hot encoded and answers with one of three commands.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass

import numpy as np

from ..neuro import Genome, argmax_action, forward
from ..seeding import make_rng


class LocationClass(enum.IntEnum):
    TOP_LEFT = 0
    TOP_CENTER = 1
    TOP_RIGHT = 2
    LEFT = 3
    CENTER = 4
    RIGHT = 5
    BOTTOM_LEFT = 6
    BOTTOM_CENTER = 7
    BOTTOM_RIGHT = 8
    NO_IMAGE = 9

    def one_hot(self) -> np.ndarray:
        v = np.zeros(len(LocationClass))
        v[self] = 1.0
        return v


class Command(enum.IntEnum):
    MOVE_LEFT = 0
    NO_MOVEMENT = 1
    MOVE_RIGHT = 2


class Start(str, enum.Enum):
    LEFT = "left"
    CENTER = "center"
    RIGHT = "right"


_LEFTISH = {LocationClass.TOP_LEFT, LocationClass.LEFT, LocationClass.BOTTOM_LEFT}
_RIGHTISH = {LocationClass.TOP_RIGHT, LocationClass.RIGHT, LocationClass.BOTTOM_RIGHT}


@dataclass(frozen=True)
class CenteringConfig:
    yaw_step: float = 10.0
    field_half_width: float = 30.0
    center_band: float = 5.0
    episodes: int = 5
    reward_per_correct: float = 100.0
    misclassification_rate: float = 0.0

    def __post_init__(self):
        if not self.yaw_step > 0:
            raise ValueError("yaw_step must be positive")
        if not 0 <= self.center_band < self.field_half_width:
            raise ValueError("center_band must lie in [0, field_half_width)")
        if not 2 * self.yaw_step < self.field_half_width:
            raise ValueError("start offsets (2 * yaw_step) must stay inside field_half_width")
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if not 0.0 <= self.misclassification_rate <= 1.0:
            raise ValueError("misclassification_rate must be in [0, 1]")

    def start_offset(self, start: Start | str) -> float:
        return {Start.LEFT: -2.0, Start.CENTER: 0.0, Start.RIGHT: 2.0}[Start(start)] * self.yaw_step

    @property
    def max_reward(self) -> float:
        return self.episodes * self.reward_per_correct


@dataclass(frozen=True)
class CenteringState:
    relative_azimuth: float
    step_index: int = 0
    accumulated_reward: float = 0.0


def true_location(azimuth: float, cfg: CenteringConfig) -> LocationClass:
    if abs(azimuth) > cfg.field_half_width:
        return LocationClass.NO_IMAGE
    if azimuth < -cfg.center_band:
        return LocationClass.LEFT
    if azimuth > cfg.center_band:
        return LocationClass.RIGHT
    return LocationClass.CENTER


def classify_location(
    state: CenteringState, cfg: CenteringConfig, rng: np.random.Generator | None = None
) -> LocationClass:
    """Oracle reading; with probability ``misclassification_rate`` a uniformly
    random wrong class is reported instead. ``rng`` may be omitted when the
    rate is zero."""
    cls = true_location(state.relative_azimuth, cfg)
    if cfg.misclassification_rate == 0.0:
        return cls
    if rng is None:
        raise ValueError("a random stream is required when misclassification_rate > 0")
    if rng.random() < cfg.misclassification_rate:
        k = int(rng.integers(len(LocationClass) - 1))
        return LocationClass(k if k < cls else k + 1)
    return cls


def correct_command(cls: LocationClass) -> Command:
    if cls in _LEFTISH:
        return Command.MOVE_LEFT
    if cls in _RIGHTISH:
        return Command.MOVE_RIGHT
    return Command.NO_MOVEMENT


def centering_step(state: CenteringState, command: Command, cfg: CenteringConfig) -> CenteringState:
    if state.step_index >= cfg.episodes:
        raise RuntimeError(f"all {cfg.episodes} episodes already used")
    az = state.relative_azimuth
    if command == Command.MOVE_LEFT:
        az += cfg.yaw_step
    elif command == Command.MOVE_RIGHT:
        az -= cfg.yaw_step
    return dataclasses.replace(state, relative_azimuth=az, step_index=state.step_index + 1)


def _check_topology(genome: Genome) -> None:
    t = genome.topology
    if t.input_size != len(LocationClass) or t.output_size != len(Command):
        raise ValueError(f"centering needs a 10-input, 3-output network, got {t.header()}")


def centering_rollout(
    genome: Genome, start: Start | str, cfg: CenteringConfig, rng: np.random.Generator | None = None
) -> tuple[CenteringState, list[tuple]]:
    """Run all episodes; rows are ``(step, azimuth, class, command, reward)``
    with the azimuth and reported class as seen before acting."""
    _check_topology(genome)
    state = CenteringState(cfg.start_offset(start))
    rows = []
    while state.step_index < cfg.episodes:
        truth = true_location(state.relative_azimuth, cfg)
        seen = classify_location(state, cfg, rng)
        cmd = Command(argmax_action(forward(genome, seen.one_hot())))
        # Graded against the true class even when the oracle misreports.
        reward = cfg.reward_per_correct if cmd == correct_command(truth) else 0.0
        rows.append((state.step_index, state.relative_azimuth, seen.name, cmd.name, reward))
        state = centering_step(state, cmd, cfg)
        state = dataclasses.replace(state, accumulated_reward=state.accumulated_reward + reward)
    return state, rows


def evaluate_centering(
    genome: Genome, start: Start | str, cfg: CenteringConfig, rng: np.random.Generator | None = None
) -> float:
    return centering_rollout(genome, start, cfg, rng)[0].accumulated_reward


class CenteringEnv:
    TRAJECTORY_COLUMNS = ("step", "azimuth", "class", "command", "reward")

    def __init__(self, cfg: CenteringConfig, start: Start | str = Start.CENTER):
        self.cfg = cfg
        self.start = Start(start)

    @property
    def max_fitness(self) -> float:
        return self.cfg.max_reward

    def evaluate(self, genome: Genome, seed: int) -> float:
        return evaluate_centering(genome, self.start, self.cfg, make_rng(seed))

    def trajectory(self, genome: Genome, seed: int) -> list[tuple]:
        return centering_rollout(genome, self.start, self.cfg, make_rng(seed))[1]
