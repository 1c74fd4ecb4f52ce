"""Experiment configuration files.

Plain ``key = value`` lines; ``#`` starts a comment. Environment constants
use a ``flappy.`` or ``centering.`` prefix. Every key has a task-dependent
default, unknown keys are rejected, and :func:`dump_config` writes a file
that loads back to an equal config.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable

from ..env.centering import CenteringConfig, Start
from ..env.flappy import FlappyConfig
from ..evolve import Algorithm, EvolutionConfig, MutationDistribution, Termination
from ..neuro import Gaussian, HiddenActivation, InitScheme, OutputActivation, Topology, Uniform


class Task(str, enum.Enum):
    FLAPPY = "flappy"
    CENTERING = "centering"


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


@dataclass(frozen=True)
class ExperimentConfig:
    task: Task
    evolution: EvolutionConfig
    env: FlappyConfig | CenteringConfig
    topology: Topology
    init: InitScheme
    termination: Termination
    master_seed: int = 0
    replications: int = 3
    output_dir: Path = Path("runs")
    starts: tuple[Start, ...] = ()
    fixed_course: bool = True

    @property
    def algorithm(self) -> Algorithm:
        return self.evolution.algorithm


# -- value parsing ----------------------------------------------------------


def _parse_bool(s: str) -> bool:
    low = s.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true/false, got {s!r}")


def _parse_optional_int(s: str) -> int | None:
    return None if s.lower() == "none" else int(s)


def _parse_int_list(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(",") if x.strip())


def _parse_starts(s: str) -> tuple[Start, ...]:
    return tuple(Start(x.strip().lower()) for x in s.split(",") if x.strip())


_INIT_RE = re.compile(r"^\s*(uniform|gaussian)\s*\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)\s*$", re.I)


def parse_init(s: str) -> InitScheme:
    m = _INIT_RE.match(s)
    if not m:
        raise ValueError(f"expected uniform(lo, hi) or gaussian(mean, sd), got {s!r}")
    kind, a, b = m.group(1).lower(), float(m.group(2)), float(m.group(3))
    return Uniform(a, b) if kind == "uniform" else Gaussian(a, b)


def _parse_seed(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise ValueError("master_seed must fit in 64 unsigned bits")
    return v


# key -> parser, in dump order
_COMMON: dict[str, Callable[[str], Any]] = {
    "task": lambda s: Task(s.lower()),
    "algorithm": lambda s: Algorithm(s.lower()),
    "population_size": int,
    "royal_family_size": int,
    "initial_resistance": float,
    "resistance_decrement": float,
    "resistance_floor": float,
    "stagnation_lo": float,
    "stagnation_hi": float,
    "mutation_magnitude": float,
    "mutation_distribution": lambda s: MutationDistribution(s.lower()),
    "baseline_mutation_prob": float,
    "hidden_sizes": _parse_int_list,
    "hidden_activation": lambda s: HiddenActivation(s.lower()),
    "output_activation": lambda s: OutputActivation(s.lower()),
    "init": parse_init,
    "max_generations": _parse_optional_int,
    "optimal_count": _parse_optional_int,
    "master_seed": _parse_seed,
    "replications": int,
    "output_dir": Path,
}

_FLAPPY = {f"flappy.{f.name}": (int if f.type in ("int", int) else float) for f in fields(FlappyConfig)}
_FLAPPY["flappy.fixed_course"] = _parse_bool
_CENTERING = {
    f"centering.{f.name}": (int if f.type in ("int", int) else float) for f in fields(CenteringConfig)
}
_CENTERING["centering.starts"] = _parse_starts

_EVOLUTION_KEYS = [f.name for f in fields(EvolutionConfig)]

TASK_DEFAULTS: dict[Task, dict[str, Any]] = {
    Task.CENTERING: {
        "population_size": 15,
        "royal_family_size": 4,
        "hidden_sizes": (10,),
        # Sigmoid units are all positive, so one-hot classes barely separate
        # the three command logits; tanh converges far more reliably here.
        "hidden_activation": HiddenActivation.TANH,
        "output_activation": OutputActivation.SOFTMAX,
        "max_generations": 50,
        "optimal_count": 7,
        "replications": 3,
        "centering.starts": (Start.LEFT, Start.CENTER, Start.RIGHT),
    },
    Task.FLAPPY: {
        "population_size": 50,
        "royal_family_size": 4,
        "hidden_sizes": (50,),
        "hidden_activation": HiddenActivation.SIGMOID,
        "output_activation": OutputActivation.SIGMOID,
        "max_generations": 75,
        "optimal_count": None,
        "replications": 3,
        "flappy.fixed_course": True,
    },
}

_IO_SIZES = {Task.FLAPPY: (3, 1), Task.CENTERING: (10, 3)}


def _raise_for(exc: Exception, keys) -> None:
    """Re-raise a dataclass validation error naming the first key it mentions."""
    msg = str(exc)
    hits = [(msg.find(k.split(".")[-1]), -len(k), k) for k in keys if k.split(".")[-1] in msg]
    if hits:
        raise ConfigError(msg, min(hits)[2]) from exc
    raise ConfigError(msg) from exc


def parse_pairs(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in pairs:
            raise ConfigError(f"duplicate key on line {lineno}", key)
        pairs[key] = value
    return pairs


def build_config(pairs: dict[str, str]) -> ExperimentConfig:
    if "task" not in pairs:
        raise ConfigError("required key missing", "task")
    try:
        task = Task(pairs["task"].lower())
    except ValueError as exc:
        raise ConfigError(f"unknown task {pairs['task']!r}", "task") from exc
    env_parsers = _FLAPPY if task is Task.FLAPPY else _CENTERING
    parsers = {**_COMMON, **env_parsers}

    values: dict[str, Any] = dict(TASK_DEFAULTS[task])
    for key, raw in pairs.items():
        if key not in parsers:
            other = _CENTERING if task is Task.FLAPPY else _FLAPPY
            hint = f" (only valid for the other task)" if key in other else ""
            raise ConfigError(f"unknown key{hint}", key)
        try:
            values[key] = parsers[key](raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"cannot parse {raw!r}: {exc}", key) from exc

    evo_kwargs = {k: values[k] for k in _EVOLUTION_KEYS if k in values}
    try:
        evolution = EvolutionConfig(**evo_kwargs)
    except ValueError as exc:
        _raise_for(exc, _EVOLUTION_KEYS)

    prefix = f"{task.value}."
    env_kwargs = {
        k[len(prefix):]: v for k, v in values.items() if k.startswith(prefix) and k[len(prefix):] not in ("starts", "fixed_course")
    }
    env_cls = FlappyConfig if task is Task.FLAPPY else CenteringConfig
    try:
        env = env_cls(**env_kwargs)
    except ValueError as exc:
        _raise_for(exc, env_parsers)

    n_in, n_out = _IO_SIZES[task]
    try:
        topology = Topology(n_in, values["hidden_sizes"], n_out, values["hidden_activation"], values["output_activation"])
    except ValueError as exc:
        raise ConfigError(str(exc), "hidden_sizes") from exc

    init = values.get("init", Uniform(-1.0, 1.0))
    try:
        termination = Termination(values["max_generations"], values["optimal_count"])
    except ValueError as exc:
        _raise_for(exc, ("max_generations", "optimal_count"))
    if termination.optimal_count is not None and termination.optimal_count > evolution.population_size:
        raise ConfigError(
            f"{termination.optimal_count} exceeds population_size {evolution.population_size}", "optimal_count"
        )

    replications = values["replications"]
    if replications < 1:
        raise ConfigError("must be >= 1", "replications")
    starts = values.get("centering.starts", ())
    if task is Task.CENTERING and not starts:
        raise ConfigError("at least one start is required", "centering.starts")

    return ExperimentConfig(
        task=task,
        evolution=evolution,
        env=env,
        topology=topology,
        init=init,
        termination=termination,
        master_seed=values.get("master_seed", 0),
        replications=replications,
        output_dir=values.get("output_dir", Path("runs")),
        starts=tuple(starts),
        fixed_course=values.get("flappy.fixed_course", True),
    )


def parse_config(text: str) -> ExperimentConfig:
    return build_config(parse_pairs(text))


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text)


def with_overrides(cfg: ExperimentConfig, *, master_seed: int | None = None, output_dir: Path | None = None):
    changes: dict[str, Any] = {}
    if master_seed is not None:
        changes["master_seed"] = master_seed
    if output_dir is not None:
        changes["output_dir"] = Path(output_dir)
    return replace(cfg, **changes)


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, enum.Enum):
        return str(v.value)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def resolved_items(cfg: ExperimentConfig) -> list[tuple[str, str]]:
    """Every setting that influences results, defaults included.

    ``output_dir`` is left out on purpose: where artifacts land does not
    change them, and keeping it out makes artifact sets comparable across
    directories.
    """
    evo, t = cfg.evolution, cfg.topology
    items: list[tuple[str, Any]] = [("task", cfg.task)]
    items += [(k, getattr(evo, k)) for k in _EVOLUTION_KEYS]
    items += [
        ("hidden_sizes", t.hidden_sizes),
        ("hidden_activation", t.hidden_activation),
        ("output_activation", t.output_activation),
        ("init", str(cfg.init)),
        ("max_generations", cfg.termination.max_generations),
        ("optimal_count", cfg.termination.optimal_count),
        ("master_seed", cfg.master_seed),
        ("replications", cfg.replications),
    ]
    prefix = cfg.task.value
    items += [(f"{prefix}.{f.name}", getattr(cfg.env, f.name)) for f in fields(cfg.env)]
    if cfg.task is Task.FLAPPY:
        items.append(("flappy.fixed_course", cfg.fixed_course))
    else:
        items.append(("centering.starts", cfg.starts))
    return [(k, _fmt(v)) for k, v in items]


def dump_config(cfg: ExperimentConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in resolved_items(cfg))
