import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anevo.env.flappy import (
    FLAP,
    NO_FLAP,
    FlappyConfig,
    FlappyEnv,
    FlappyState,
    evaluate_flappy,
    flappy_observe,
    flappy_reset,
    flappy_rollout,
    flappy_step,
    make_course,
    max_flappy_score,
)
from anevo.neuro import Gaussian, Genome, Topology, init_genome
from anevo.seeding import make_rng

CFG = FlappyConfig()


def gap_follower(margin=0.05, hidden="tanh"):
    """Flap whenever the bird is more than ``margin`` (normalized) below the gap center."""
    t = Topology(3, (1,), 1, hidden, "sigmoid")
    k = 20.0
    return Genome([0.0, k, -k, -k * margin, 10.0, 0.0], t)


def state_with(height, pipes, frame=0, velocity=0.0):
    base = flappy_reset(CFG, 0)
    return FlappyState(height, velocity, tuple(pipes), frame, True, 0.0, base.course, 1)


def test_reset_is_seed_deterministic():
    assert flappy_reset(CFG, 5) == flappy_reset(CFG, 5)
    assert flappy_reset(CFG, 5).course != flappy_reset(CFG, 6).course


def test_reset_starts_mid_height_with_one_pipe():
    s = flappy_reset(CFG, 1)
    assert s.bird_height == 25.0 and s.bird_velocity == 0.0
    assert s.frame == 0 and s.alive and s.score == 0.0
    assert s.pipes == ((30.0, s.course[0]),)


def test_gap_centers_keep_gap_inside_world():
    course = make_course(CFG, 3)
    assert len(course) == 167
    assert np.all(course >= 6.25) and np.all(course <= 43.75)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_free_fall_closed_form(k):
    s = flappy_reset(CFG, 0)
    for _ in range(k):
        s = flappy_step(s, NO_FLAP, CFG)
    assert s.bird_velocity == pytest.approx(k * 0.05, abs=1e-12)
    assert s.bird_height == pytest.approx(25.0 - 0.05 * k * (k + 1) / 2, abs=1e-12)
    assert s.score == k and s.frame == k


def test_never_flapping_hits_the_floor():
    # height after k frames is 25 - 0.025 k (k + 1): first <= 0 at k = 32
    s = flappy_reset(CFG, 0)
    while s.alive:
        s = flappy_step(s, NO_FLAP, CFG)
    assert s.frame == 32 and s.score == 31.0


def test_always_flapping_hits_the_ceiling():
    # rises 0.8 per frame: 25 + 0.8 k >= 50 first at k = 32
    s = flappy_reset(CFG, 0)
    heights = []
    while s.alive:
        s = flappy_step(s, FLAP, CFG)
        heights.append(s.bird_height)
    assert all(b > a for a, b in zip(heights, heights[1:]))
    assert s.frame == 32 and s.score == 31.0 and s.bird_height >= 50.0


def test_flap_sets_velocity():
    s = flappy_step(flappy_reset(CFG, 0), FLAP, CFG)
    assert s.bird_velocity == -0.8
    assert s.bird_height == pytest.approx(25.8)


def test_pipe_collision_outside_gap():
    s = state_with(10.0, [(0.25, 40.0)])
    after = flappy_step(s, NO_FLAP, CFG)
    assert not after.alive and after.score == 0.0


def test_no_collision_inside_gap():
    s = state_with(40.0, [(0.25, 40.0)])
    assert flappy_step(s, NO_FLAP, CFG).alive


def test_passing_a_pipe_scores():
    s = state_with(10.0, [(-3.9, 40.0)])
    after = flappy_step(s, NO_FLAP, CFG)
    assert after.alive and after.score == 51.0 and after.pipes == ()


def test_spawn_every_spacing_frames():
    s = state_with(25.0, [(10.0, 25.0)], frame=59)
    after = flappy_step(s, NO_FLAP, CFG)
    assert after.frame == 60 and after.spawned == 2
    assert after.pipes[-1] == (30.0, s.course[1])


def test_dead_bird_cannot_step():
    s = flappy_step(state_with(10.0, [(0.25, 40.0)]), NO_FLAP, CFG)
    with pytest.raises(RuntimeError):
        flappy_step(s, NO_FLAP, CFG)


def test_observation():
    s = flappy_reset(CFG, 2)
    obs = flappy_observe(s, CFG)
    assert obs.tolist() == [1.0, s.course[0] / 50.0, 0.5]
    assert flappy_observe(state_with(25.0, [(-2.0, 10.0)]), CFG)[0] == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.lists(st.sampled_from([FLAP, NO_FLAP]), max_size=150))
def test_observations_stay_in_unit_box(seed, actions):
    s = flappy_reset(CFG, seed)
    for a in actions:
        obs = flappy_observe(s, CFG)
        assert np.all((obs >= 0) & (obs <= 1))
        s = flappy_step(s, a, CFG)
        if not s.alive:
            break


def test_max_score_closed_form():
    # pipe i spawns at frame 60 i and its trailing edge clears the bird once
    # 30 - 0.5 (f - 60 i) + 4 < 0, i.e. at frame 60 i + 69
    passed = sum(1 for i in range(1000) if 60 * i + 69 <= 10_000 and 60 * i <= 10_000)
    assert max_flappy_score(CFG) == 10_000 + 50 * passed == 18_300.0


def test_gap_follower_reaches_the_cap():
    g = gap_follower()
    for seed in range(5):
        assert evaluate_flappy(g, CFG, seed) == 18_300.0
    state, rows = flappy_rollout(g, CFG, 0)
    assert state.alive and state.frame == 10_000 and state.score == 18_300.0
    assert len(rows) == 10_001


def test_rollout_respects_frame_cap():
    cfg = FlappyConfig(max_frames=100)
    assert evaluate_flappy(gap_follower(), cfg, 0) == max_flappy_score(cfg) == 100 + 50


@pytest.mark.parametrize("hidden", ["sigmoid", "tanh", "relu"])
def test_kernel_matches_reference(hidden):
    t = Topology(3, (8,), 1, hidden, "sigmoid")
    rng = make_rng(17)
    for i in range(25):
        g = init_genome(t, Gaussian(0, 2), rng)
        assert evaluate_flappy(g, CFG, i) == evaluate_flappy(g, CFG, i, fast=False)
    g = gap_follower(0.08, hidden if hidden != "relu" else "tanh")
    assert evaluate_flappy(g, CFG, 3) == evaluate_flappy(g, CFG, 3, fast=False)


def test_wrong_topology_rejected():
    with pytest.raises(ValueError):
        evaluate_flappy(Genome(np.zeros(143), Topology(10, (10,), 3)), CFG, 0)


def test_env_fixed_course_ignores_seed():
    g = init_genome(Topology(3, (50,), 1), Gaussian(0, 1), make_rng(1))
    fixed = FlappyEnv(CFG, course_seed=9)
    assert fixed.evaluate(g, 1) == fixed.evaluate(g, 2) == evaluate_flappy(g, CFG, 9)
    assert FlappyEnv(CFG).evaluate(g, 4) == evaluate_flappy(g, CFG, 4)
    assert fixed.max_fitness == 18_300.0


def test_trajectory_rows():
    rows = FlappyEnv(CFG, 0).trajectory(gap_follower(), 0)[:3]
    assert [r[0] for r in rows] == [0, 1, 2]
    assert rows[0][1:] == (25.0, 0.0, 0.0)


@pytest.mark.parametrize("kwargs", [dict(gravity=0), dict(pipe_gap=60.0), dict(pipe_spacing=0), dict(max_frames=0)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        FlappyConfig(**kwargs)
