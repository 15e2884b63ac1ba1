"""Command-line surface."""

import argparse
from pathlib import Path

from latency.presets import DelayEnvironment
from scheduler.feature_select import PolicyKind


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, required=True, help="run configuration (.cfg)")
    parser.add_argument("--seed", type=int, default=None, help="override run.seed")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument(
        "--policies",
        default=None,
        help="comma-separated policies (" + ", ".join(p.value for p in PolicyKind) + ")",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamsim",
        description="Streaming perception simulator: latency-aware forecasting policies and streaming AP.",
    )
    parser.add_argument("--log-level", default=None, help="override STREAMSIM_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="simulate policies and write logs and reports")
    _add_run_flags(simulate)

    compare = commands.add_parser("compare", help="paired comparison table of two or more policies")
    _add_run_flags(compare)

    histogram = commands.add_parser("histogram", help="delay histogram of a stream log")
    histogram.add_argument("--log", type=Path, required=True, help="stream_log.jsonl")
    histogram.add_argument("--bin-width", type=float, default=2.0, help="bin width in ms")
    histogram.add_argument("--policy", default=None, choices=[p.value for p in PolicyKind])
    histogram.add_argument("--out", type=Path, default=None, help="output directory")

    fit = commands.add_parser("fit-latency", help="fit a shifted log-normal delay model")
    fit.add_argument("--mean", type=float, default=None, help="target mean delay, ms")
    fit.add_argument("--std", type=float, default=None, help="target delay std, ms")
    fit.add_argument("--min", type=float, default=None, help="minimum delay, ms")
    fit.add_argument("--environment", default=None, choices=[e.value for e in DelayEnvironment])
    fit.add_argument("--measured-with", default="adaptive", choices=["adaptive", "baseline"])
    fit.add_argument("--samples", type=int, default=0, help="draw this many samples and report moments")
    fit.add_argument("--seed", type=int, default=0)

    evaluate = commands.add_parser("evaluate", help="score a stream log against COCO ground truth")
    evaluate.add_argument("--log", type=Path, required=True, help="stream_log.jsonl")
    evaluate.add_argument("--ground-truth", type=Path, required=True, help="COCO annotation JSON")
    evaluate.add_argument("--fps", type=float, default=None, help="frame rate of the annotated frames")
    evaluate.add_argument("--warmup-frames", type=int, default=0)
    evaluate.add_argument("--out", type=Path, default=None, help="output directory")

    return parser
