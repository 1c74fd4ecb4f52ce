from .campaign import (
    CampaignSummary,
    Comparison,
    compare_algorithms,
    emit_summary,
    run_campaign,
    run_replication,
)
from .config import ConfigError, ExperimentConfig, Task, dump_config, load_config, parse_config

__all__ = [
    "CampaignSummary",
    "Comparison",
    "ConfigError",
    "ExperimentConfig",
    "Task",
    "compare_algorithms",
    "dump_config",
    "emit_summary",
    "load_config",
    "parse_config",
    "run_campaign",
    "run_replication",
]
