"""Compiled Flappy rollout.

Mirrors ``flappy_reset``/``flappy_step``/``flappy_observe``/``forward``
operation for operation so scores agree with the reference path. A good agent
can fly all ``max_frames`` frames, which is far too slow through the Python
step functions.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _sigmoid(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@njit(cache=True, nogil=True)
def _forward(weights, sizes, hidden_code, out_code, x):
    a = x
    off = 0
    n_layers = sizes.shape[0] - 1
    for layer in range(n_layers):
        fan_in = sizes[layer]
        fan_out = sizes[layer + 1]
        z = np.empty(fan_out)
        for j in range(fan_out):
            row = off + j * (fan_in + 1)
            acc = 0.0
            for i in range(fan_in):
                acc += weights[row + i] * a[i]
            z[j] = acc + weights[row + fan_in]
        off += fan_out * (fan_in + 1)
        if layer < n_layers - 1:
            for j in range(fan_out):
                if hidden_code == 0:
                    z[j] = _sigmoid(z[j])
                elif hidden_code == 1:
                    z[j] = math.tanh(z[j])
                else:
                    z[j] = max(z[j], 0.0)
        elif out_code == 0:
            for j in range(fan_out):
                z[j] = _sigmoid(z[j])
        elif out_code == 1:
            m = z.max()
            s = 0.0
            for j in range(fan_out):
                z[j] = math.exp(z[j] - m)
                s += z[j]
            for j in range(fan_out):
                z[j] = z[j] / s
        a = z
    return a


@njit(cache=True, nogil=True)
def flappy_rollout(
    weights, sizes, hidden_code, out_code, course,
    gravity, flap_impulse, pipe_speed, pipe_gap, pipe_width, pipe_spacing,
    world_height, max_frames, score_per_frame, score_per_pipe,
):
    n_course = course.shape[0]
    dist = np.empty(n_course)
    spawn_d = pipe_spacing * pipe_speed
    half = pipe_gap / 2
    h = world_height / 2
    v = 0.0
    score = 0.0
    dist[0] = spawn_d
    head = 0
    spawned = 1
    obs = np.empty(3)
    frame = 0
    while frame < max_frames:
        d0 = dist[head]
        obs[0] = min(max(max(d0, 0.0) / spawn_d, 0.0), 1.0)
        obs[1] = min(max(course[head] / world_height, 0.0), 1.0)
        obs[2] = min(max(h / world_height, 0.0), 1.0)
        out = _forward(weights, sizes, hidden_code, out_code, obs)
        if out[0] > 0.5:
            v = -flap_impulse
        else:
            v = v + gravity
        h = h - v
        for k in range(head, spawned):
            dist[k] = dist[k] - pipe_speed
        frame += 1
        if h <= 0.0 or h >= world_height:
            break
        hit = False
        for k in range(head, spawned):
            if dist[k] <= 0.0 <= dist[k] + pipe_width and abs(h - course[k]) > half:
                hit = True
        if hit:
            break
        score += score_per_frame
        while head < spawned and dist[head] + pipe_width < 0.0:
            head += 1
            score += score_per_pipe
        if frame % pipe_spacing == 0 and spawned < n_course:
            dist[spawned] = spawn_d
            spawned += 1
    return score
