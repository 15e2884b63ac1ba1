import logging
import sys
from typing import Optional

from cli.commands import (
    cmd_compare,
    cmd_evaluate,
    cmd_fit_latency,
    cmd_histogram,
    cmd_simulate,
)
from cli.parser import build_parser
from config import LOG_LEVEL
from core.errors import ConfigError, StreamSimError, TraceExhaustedError
from utils.formatters import format_comparison_table, format_fit, format_summary_line

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_TRACE_EXHAUSTED = 3


def _dispatch(args) -> None:
    if args.command == "simulate":
        result = cmd_simulate(args.config, seed=args.seed, out=args.out, policies=args.policies)
        for report in result.reports.values():
            print(format_summary_line(report))

    elif args.command == "compare":
        result = cmd_compare(args.config, policies=args.policies, seed=args.seed, out=args.out)
        print(format_comparison_table(result.rows))

    elif args.command == "histogram":
        histogram = cmd_histogram(args.log, args.bin_width, out=args.out, policy=args.policy)
        print(f"{histogram.job_count} jobs in {len(histogram.bins)} bins -> {histogram.path}")

    elif args.command == "fit-latency":
        fit = cmd_fit_latency(
            mean_ms=args.mean,
            std_ms=args.std,
            min_ms=args.min,
            environment=args.environment,
            measured_with=args.measured_with,
            samples=args.samples,
            seed=args.seed,
        )
        print(format_fit(fit.model))
        if fit.empirical is not None:
            print(f"empirical mean  {fit.empirical['mean_ms']:.6f} ms")
            print(f"empirical std   {fit.empirical['std_ms']:.6f} ms")

    elif args.command == "evaluate":
        result = cmd_evaluate(
            args.log,
            args.ground_truth,
            fps=args.fps,
            warmup_frames=args.warmup_frames,
            out=args.out,
        )
        for report in result.reports.values():
            print(format_summary_line(report))


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    level = (args.log_level or LOG_LEVEL).upper()
    if not isinstance(logging.getLevelName(level), int):
        print(f"error: unknown log level {args.log_level!r}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        _dispatch(args)
    except TraceExhaustedError as e:
        logger.error("Latency trace exhausted: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TRACE_EXHAUSTED
    except ConfigError as e:
        logger.error("Invalid configuration: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (StreamSimError, ValueError, OSError) as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
