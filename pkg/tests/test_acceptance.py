"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary under "acceptance criteria".
"""

import statistics
import subprocess
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import binom

from anevo.env.centering import CenteringConfig, Start, evaluate_centering
from anevo.evolve import EvolutionConfig, Termination, checkered_crossover, mutate
from anevo.evolve.operators import checkered
from anevo.evolve.resistance import MutationController, update_resistance
from anevo.harness import load_config
from anevo.harness.campaign import compare_algorithms, default_seeds, run_campaign, run_replication
from anevo.harness.config import with_overrides
from anevo.neuro import Genome, Topology
from anevo.seeding import make_rng

from conftest import exact_mapping_genome

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_1_centering_convergence(tmp_path, report):
    cfg = with_overrides(load_config(CONFIGS / "centering.cfg"), output_dir=tmp_path)
    t0 = time.perf_counter()
    summary = run_campaign(cfg)
    elapsed = time.perf_counter() - t0
    gens = [r.generations for r in summary.rows]
    converged = all(r.ok and r.stop_reason == "optimal_count" for r in summary.rows)
    ok = len(gens) == 9 and converged and max(gens) <= 20 and statistics.median(gens) <= 7
    report(1, "centering convergence", ok, f"generations={gens}, median={statistics.median(gens)}, {elapsed:.1f}s")
    assert ok


def test_2_centering_solvability(report):
    g = exact_mapping_genome()
    scores = {s.value: evaluate_centering(g, s, CenteringConfig()) for s in Start}
    ok = all(v == 500.0 for v in scores.values())
    report(2, "hand-built genome scores 500 from every start", ok, str(scores))
    assert ok


@pytest.mark.slow
def test_3_anv1_beats_baseline(tmp_path, report):
    a = with_overrides(load_config(CONFIGS / "flappy_anv1.cfg"), output_dir=tmp_path)
    b = load_config(CONFIGS / "flappy_baseline.cfg")
    assert a.termination.max_generations == b.termination.max_generations == 75
    assert a.evolution.population_size == b.evolution.population_size == 50
    assert a.env == b.env
    cmp = compare_algorithms(a, b, default_seeds(a))
    ratios = [round(r.ratio, 3) for r in cmp.rows]
    ok = len(cmp.rows) == 3 and cmp.wins >= 2 and cmp.geometric_mean > 1.3
    report(3, "ANv1 beats the layer-swap baseline", ok, f"ratios={ratios}, geomean={cmp.geometric_mean:.3f}")
    assert ok


def test_4_elitism_monotone(report):
    cfg = load_config(CONFIGS / "flappy_anv1.cfg")
    cfg = replace(cfg, termination=Termination(max_generations=50))
    bad = []
    for seed in default_seeds(cfg):
        wf = [r.winner_fitness for r in run_replication(cfg, None, seed).records]
        assert len(wf) == 50
        bad += [(seed, g) for g in range(1, 50) if wf[g] < wf[g - 1]]
    ok = not bad
    report(4, "winner fitness never decreases", ok, f"{len(bad)} decreases over 3 runs")
    assert ok


def parity_oracle(a, b):
    c1, c2 = [], []
    for i in range(len(a)):
        if i % 2 == 0:
            c1.append(a[i])
            c2.append(b[i])
        else:
            c1.append(b[i])
            c2.append(a[i])
    return c1, c2


def test_5_crossover_oracle(report):
    rng = make_rng(2024)
    mismatches = 0
    for _ in range(1000):
        n = int(rng.integers(1, 144))
        a, b = rng.normal(size=n), rng.normal(size=n)
        c1, c2 = checkered(a, b)
        o1, o2 = parity_oracle(a.tolist(), b.tolist())
        if c1.tolist() != o1 or c2.tolist() != o2:
            mismatches += 1
        if any(sorted((c1[i], c2[i])) != sorted((a[i], b[i])) for i in range(n)):
            mismatches += 1
        if n >= 2:
            t = Topology(n - 1, (), 1)
            g1, g2 = checkered_crossover(Genome(a, t), Genome(b, t))
            mismatches += g1.weights.tolist() != o1 or g2.weights.tolist() != o2
    ok = mismatches == 0
    report(5, "checkered crossover matches the parity oracle", ok, f"{mismatches} mismatches in 1000 pairs")
    assert ok


def test_6_resistance_state_machine(report):
    fitness = (
        [1000.0]          # first generation: reset
        + [1020.0]        # +2%: single stagnation
        + [1020.0] * 18   # chained stagnation down to the floor, then held
        + [1500.0]        # +47%: upward breakthrough
        + [1500.0]        # stagnation
        + [1000.0]        # -33%: downward breakthrough
    )
    expected = [
        0.95,
        0.90,
        0.85, 0.80, 0.75, 0.70, 0.65, 0.60, 0.55, 0.50, 0.45,
        0.40, 0.35, 0.30, 0.25, 0.20, 0.15, 0.10, 0.05, 0.05,
        0.95,
        0.90,
        0.95,
    ]
    cfg = EvolutionConfig()
    mc = MutationController.start(cfg)
    got = [update_resistance(mc, f, cfg) for f in fitness]
    ok = got == expected
    report(6, "resistance controller sequence", ok, "" if ok else f"got {got}")
    assert ok


def test_7_mutation_statistics(report):
    n, p = 10_000, 0.05
    lo, hi = binom.interval(0.999, n, p)
    t = Topology(n - 1, (), 1)
    base = Genome(make_rng(1).uniform(-1, 1, n), t)
    inside = 0
    untouched_ok = True
    for trial in range(100):
        out = mutate(base, p, 0.3, "gaussian_additive", make_rng(trial))
        changed = out.weights != base.weights
        inside += lo <= changed.sum() <= hi
        # the selection mask is the first n uniforms of the stream
        mask = make_rng(trial).random(n) < p
        untouched_ok &= out.weights[~mask].tobytes() == base.weights[~mask].tobytes()
        untouched_ok &= bool(np.array_equal(changed, mask))
    ok = inside >= 99 and untouched_ok
    report(7, "mutation count in 99.9% binomial band", ok, f"{inside}/100 inside [{lo:.0f}, {hi:.0f}], unselected identical={untouched_ok}")
    assert ok


def cli_run(config, out, *extra):
    cmd = [sys.executable, "-m", "anevo", "run", str(config), "--out", str(out), *extra]
    return subprocess.run(cmd, capture_output=True, text=True).returncode


def artifacts(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_8_determinism(tmp_path, report):
    details, ok = [], True
    for name, extra in [("centering.cfg", ["--trajectories"]), ("flappy_anv1.cfg", [])]:
        runs = [
            tmp_path / name / "w1a",
            tmp_path / name / "w1b",
            tmp_path / name / "w4",
        ]
        codes = [
            cli_run(CONFIGS / name, runs[0], "--workers", "1", *extra),
            cli_run(CONFIGS / name, runs[1], "--workers", "1", *extra),
            cli_run(CONFIGS / name, runs[2], "--workers", "4", *extra),
        ]
        sets = [artifacts(r) for r in runs]
        same = codes == [0, 0, 0] and sets[0] == sets[1] == sets[2] and len(sets[0]) > 0
        ok &= same
        details.append(f"{name}: {len(sets[0])} files {'identical' if same else 'DIFFER'}")
    report(8, "byte-identical artifacts across reruns and worker counts", ok, "; ".join(details))
    assert ok
