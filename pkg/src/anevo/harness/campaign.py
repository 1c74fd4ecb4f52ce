"""Seeded multi-run campaigns and algorithm comparisons."""

from __future__ import annotations

import csv
import io
import logging
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ..env.centering import CenteringEnv, Start
from ..env.flappy import FlappyEnv
from ..evolve import RunLog, evolve_until
from ..neuro import dump_genome
from ..seeding import STREAM_COURSE, STREAM_EVAL, STREAM_REPLICATION, derive_seed
from .config import ExperimentConfig, Task, dump_config

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = (
    "experiment",
    "start",
    "seed",
    "generations",
    "final_winner_fitness",
    "mean_normalized_last10",
    "stop_reason",
    "status",
)
METRICS = ("generations", "final_winner_fitness", "mean_normalized_last10")
COMPARISON_COLUMNS = ("seed", "algorithm_a", "algorithm_b", "score_a", "score_b", "ratio")
LAST_N = 10


@dataclass(frozen=True)
class ReplicationResult:
    experiment: int
    start: str
    seed: int
    generations: int | None = None
    final_winner_fitness: float | None = None
    mean_normalized_last10: float | None = None
    stop_reason: str = ""
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class CampaignSummary:
    rows: list[ReplicationResult] = field(default_factory=list)

    def aggregate(self) -> dict[str, tuple[float, float, float]]:
        """``metric -> (min, median, max)`` over successful replications."""
        good = [r for r in self.rows if r.ok and r.generations]
        out = {}
        for m in METRICS:
            vals = [getattr(r, m) for r in good]
            if vals:
                out[m] = (min(vals), statistics.median(vals), max(vals))
        return out

    @property
    def failed(self) -> list[ReplicationResult]:
        return [r for r in self.rows if not r.ok]


def mean_last(runlog: RunLog, n: int = LAST_N) -> float | None:
    tail = runlog.records[-n:]
    if not tail:
        return None
    return math.fsum(r.normalized_score for r in tail) / len(tail)


def experiment_plan(cfg: ExperimentConfig) -> list[tuple[int, Start | None, int]]:
    """``(experiment index, start, seed)`` for every replication.

    Centering runs every start ``replications`` times; Flappy has no start.
    """
    starts: Sequence[Start | None] = cfg.starts if cfg.task is Task.CENTERING else (None,)
    plan = []
    for si, start in enumerate(starts):
        for rep in range(cfg.replications):
            e = si * cfg.replications + rep
            plan.append((e, start, derive_seed(cfg.master_seed, STREAM_REPLICATION, e)))
    return plan


def make_env(cfg: ExperimentConfig, start: Start | None, seed: int):
    if cfg.task is Task.FLAPPY:
        course = derive_seed(seed, STREAM_COURSE) if cfg.fixed_course else None
        return FlappyEnv(cfg.env, course_seed=course)
    return CenteringEnv(cfg.env, start or Start.CENTER)


def run_replication(
    cfg: ExperimentConfig,
    start: Start | None,
    seed: int,
    *,
    rep_dir: Path | None = None,
    name: str = "run",
    workers: int = 1,
    trajectories: bool = False,
) -> RunLog:
    """One evolve-until run; with ``rep_dir`` set, checkpoint each generation's
    winner there (and optionally its trajectory) and write the run log."""
    env = make_env(cfg, start, seed)
    on_generation = None
    if rep_dir is not None:
        rep_dir.mkdir(parents=True, exist_ok=True)
        (rep_dir / "winners").mkdir(exist_ok=True)
        if trajectories:
            (rep_dir / "trajectories").mkdir(exist_ok=True)

        def on_generation(record, population):
            g = record.generation_index
            winner = population[record.winner_slot]
            (rep_dir / "winners" / f"gen_{g:04d}.txt").write_text(dump_genome(winner), encoding="utf-8")
            if trajectories:
                rows = env.trajectory(winner, derive_seed(seed, STREAM_EVAL, g, record.winner_slot))
                _write_csv(rep_dir / "trajectories" / f"gen_{g:04d}.csv", env.TRAJECTORY_COLUMNS, rows)

    runlog = evolve_until(
        cfg.evolution,
        env,
        cfg.termination,
        seed,
        topology=cfg.topology,
        init=cfg.init,
        workers=workers,
        on_generation=on_generation,
    )
    if rep_dir is not None:
        (rep_dir / f"{name}.csv").write_text(runlog.to_csv(), encoding="utf-8")
    return runlog


def _fmt_num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_num(x) if isinstance(x, (int, float)) and not isinstance(x, bool) else x for x in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def run_campaign(
    cfg: ExperimentConfig, *, workers: int = 1, trajectories: bool = False
) -> CampaignSummary:
    """Run every replication, writing artifacts under ``cfg.output_dir``.

    Layout: ``resolved_config.txt`` and ``summary.csv`` at the top,
    ``rep_<e>/run_<e>.csv`` plus ``rep_<e>/winners/`` per replication. A
    replication that raises is recorded as failed; the others still run.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.txt").write_text(dump_config(cfg), encoding="utf-8")

    summary = CampaignSummary()
    for e, start, seed in experiment_plan(cfg):
        start_name = start.value if start is not None else ""
        try:
            runlog = run_replication(
                cfg, start, seed, rep_dir=out / f"rep_{e}", name=f"run_{e}",
                workers=workers, trajectories=trajectories,
            )
        except Exception as exc:
            log.error("replication %d failed: %s", e, exc)
            summary.rows.append(
                ReplicationResult(e, start_name, seed, status=f"failed: {exc}".replace("\n", " "))
            )
            continue
        last = runlog.records[-1] if runlog.records else None
        summary.rows.append(
            ReplicationResult(
                experiment=e,
                start=start_name,
                seed=seed,
                generations=len(runlog.records),
                final_winner_fitness=last.winner_fitness if last else None,
                mean_normalized_last10=mean_last(runlog),
                stop_reason=runlog.stop_reason,
            )
        )
        log.info("replication %d (%s): %d generations, %s", e, start_name or cfg.task.value,
                 len(runlog.records), runlog.stop_reason)
    (out / "summary.csv").write_text(emit_summary(summary, "csv"), encoding="utf-8")
    return summary


def _summary_table(summary: CampaignSummary) -> list[list[str]]:
    rows = []
    for r in summary.rows:
        rows.append([str(r.experiment), r.start, str(r.seed), _fmt_num(r.generations),
                     _fmt_num(r.final_winner_fitness), _fmt_num(r.mean_normalized_last10),
                     r.stop_reason, r.status])
    agg = summary.aggregate()
    for i, label in enumerate(("min", "median", "max")):
        if not agg:
            break
        rows.append([label, "", "", *(_fmt_num(agg[m][i]) if m in agg else "" for m in METRICS), "", ""])
    return rows


def emit_summary(summary: CampaignSummary, fmt: str = "csv") -> str:
    """Render as ``csv`` or an aligned ``table``.

    Per-replication rows come first, then ``min``/``median``/``max`` rows
    over the successful ones. An empty summary gives just the header.
    """
    rows = _summary_table(summary)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "table":
        table = [list(SUMMARY_COLUMNS), *rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(SUMMARY_COLUMNS))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown summary format {fmt!r}")


# -- comparisons ------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonRow:
    seed: int
    score_a: float
    score_b: float

    @property
    def ratio(self) -> float:
        if self.score_a == self.score_b:
            return 1.0
        if self.score_b == 0:
            return math.inf
        return self.score_a / self.score_b


@dataclass
class Comparison:
    algorithm_a: str
    algorithm_b: str
    rows: list[ComparisonRow] = field(default_factory=list)

    @property
    def geometric_mean(self) -> float:
        ratios = [r.ratio for r in self.rows]
        if not ratios or any(r <= 0 for r in ratios):
            return math.nan
        if any(math.isinf(r) for r in ratios):
            return math.inf
        return math.exp(math.fsum(math.log(r) for r in ratios) / len(ratios))

    @property
    def wins(self) -> int:
        return sum(1 for r in self.rows if r.score_a > r.score_b)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COMPARISON_COLUMNS)
        for r in self.rows:
            w.writerow([r.seed, self.algorithm_a, self.algorithm_b, repr(r.score_a), repr(r.score_b), repr(r.ratio)])
        w.writerow(["geomean", self.algorithm_a, self.algorithm_b, "", "", repr(self.geometric_mean)])
        return buf.getvalue()


def default_seeds(cfg: ExperimentConfig) -> list[int]:
    return [derive_seed(cfg.master_seed, STREAM_REPLICATION, r) for r in range(cfg.replications)]


def compare_algorithms(
    cfg_a: ExperimentConfig,
    cfg_b: ExperimentConfig,
    seeds: Sequence[int] | None = None,
    *,
    workers: int = 1,
    write: bool = True,
) -> Comparison:
    """Mean normalized score over the last 10 generations, ``a`` over ``b``,
    for each seed, with both sides flying identical courses.

    Centering comparisons use the first configured start.
    """
    if cfg_a.task is not cfg_b.task:
        raise ValueError(f"task mismatch: {cfg_a.task.value} vs {cfg_b.task.value}")
    if cfg_a.env != cfg_b.env:
        raise ValueError("environment constants differ between the two configs")
    if cfg_a.termination != cfg_b.termination:
        raise ValueError("generation budgets (termination rules) differ")
    if cfg_a.fixed_course != cfg_b.fixed_course or cfg_a.starts[:1] != cfg_b.starts[:1]:
        raise ValueError("evaluation settings differ between the two configs")
    seeds = list(seeds) if seeds is not None else default_seeds(cfg_a)
    start = cfg_a.starts[0] if cfg_a.starts else None

    cmp = Comparison(cfg_a.algorithm.value, cfg_b.algorithm.value)
    for seed in seeds:
        a = mean_last(run_replication(cfg_a, start, seed, workers=workers))
        b = mean_last(run_replication(cfg_b, start, seed, workers=workers))
        cmp.rows.append(ComparisonRow(seed, a if a is not None else 0.0, b if b is not None else 0.0))
        log.info("seed %d: %s=%.3f %s=%.3f", seed, cmp.algorithm_a, cmp.rows[-1].score_a,
                 cmp.algorithm_b, cmp.rows[-1].score_b)
    if write:
        out = Path(cfg_a.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.csv").write_text(cmp.to_csv(), encoding="utf-8")
    return cmp


__all__ = [
    "CampaignSummary",
    "Comparison",
    "ComparisonRow",
    "ReplicationResult",
    "compare_algorithms",
    "default_seeds",
    "emit_summary",
    "experiment_plan",
    "make_env",
    "mean_last",
    "run_campaign",
    "run_replication",
]
