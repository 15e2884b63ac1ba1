"""Batch front-end: run configuration, commands and the argparse surface.

Exports:
- RunConfig / load_run_config / parse_run_config: configuration (run_config.py)
- run_experiment and the cmd_* functions: commands (commands.py)
- build_parser: argparse surface (parser.py)
"""

from cli.commands import (
    ExperimentResult,
    cmd_compare,
    cmd_evaluate,
    cmd_fit_latency,
    cmd_histogram,
    cmd_simulate,
    delay_histogram,
    rerun_report,
    run_experiment,
)
from cli.parser import build_parser
from cli.run_config import (
    LatencyConfig,
    ObserverConfig,
    RunConfig,
    WorldConfig,
    derive_seed,
    load_run_config,
    parse_run_config,
    run_config_from_dict,
)

__all__ = [
    # Configuration
    "LatencyConfig",
    "ObserverConfig",
    "RunConfig",
    "WorldConfig",
    "derive_seed",
    "load_run_config",
    "parse_run_config",
    "run_config_from_dict",
    # Commands
    "ExperimentResult",
    "cmd_compare",
    "cmd_evaluate",
    "cmd_fit_latency",
    "cmd_histogram",
    "cmd_simulate",
    "delay_histogram",
    "rerun_report",
    "run_experiment",
    # Parser
    "build_parser",
]
